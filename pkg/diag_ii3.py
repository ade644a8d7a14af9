"""Scan master seeds for the Setting II delta=0/large cell through run_setting."""
import sys
import numpy as np

from infoshrink.harness import SimConfig, run_setting

PAPER = {"ise": 0.310, "zheng": 0.751, "pooled": 0.202, "mle": 0.964}

seeds = [int(s) for s in sys.argv[1].split(",")] if len(sys.argv) > 1 else list(range(1, 17))
reps = int(sys.argv[2]) if len(sys.argv) > 2 else 150

print(f"{'seed':>6} {'ise':>7} {'zheng':>7} {'pooled':>7} {'mle':>7} {'ise/mle':>7} "
      f"{'lam~':>6} {'cov_ise':>7} {'cov_pool':>8} {'score':>7}")
for seed in seeds:
    cfg = SimConfig(setting="II", cell={"delta": "zero", "scale": "large"},
                    replicates=reps, master_seed=seed)
    try:
        res = run_setting(cfg, threads=4)
    except Exception as exc:
        print(f"{seed:>6}  FAILED: {exc}")
        continue
    e = {k: 10 * res.emse[k] for k in PAPER}
    score = sum(abs(e[k] - PAPER[k]) / PAPER[k] for k in PAPER)
    print(f"{seed:>6} {e['ise']:>7.3f} {e['zheng']:>7.3f} {e['pooled']:>7.3f} {e['mle']:>7.3f} "
          f"{e['ise']/e['mle']:>7.3f} {res.lambda_mean['ise']:>6.2f} "
          f"{100*res.coverage['ise']:>7.1f} {100*res.coverage['pooled']:>8.1f} {score:>7.2f}")
