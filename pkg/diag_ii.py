"""Diagnose Setting II large-cell difficulty as a function of the source draw."""
import numpy as np

from infoshrink.families import BERNOULLI
from infoshrink.harness import SimConfig, _build_cell, _stream, _normals, _design_iid, _bernoulli_data
from infoshrink.glm import fit_mle
from infoshrink.data import Dataset

BETA1 = np.array([1.0, -1.8, -1.2, 1.6, 0.2])
N1 = N2 = 500
SCALE_LARGE = 3.0

def source_draw(master):
    gen = _stream(master, 2, 0, 1, N1)  # setting II tag=2, source stream, scale flag 1=large
    X = _design_iid(gen, N1, 4, SCALE_LARGE)
    data = _bernoulli_data(gen, X, BETA1)
    fit = fit_mle(BERNOULLI, data)
    return fit.beta_hat

def asymptotic_mse(beta2, scale, n2, m=200_000, seed=0):
    rng = np.random.default_rng(seed)
    X = np.vstack([np.ones(m), rng.normal(0.0, scale, size=(4, m))])
    eta = beta2 @ X
    w = 1.0 / (np.exp(eta) + np.exp(-eta) + 2.0)
    info = (X * w) @ X.T / m
    return np.trace(np.linalg.inv(info)) / n2

def finite_sample_mse(beta2, scale, n2, reps=200, seed=1):
    rng = np.random.default_rng(seed)
    errs = []
    nfail = 0
    for _ in range(reps):
        X = np.vstack([np.ones(n2), rng.normal(0.0, scale, size=(4, n2))])
        eta = np.clip(beta2 @ X, -35, 35)
        y = (rng.random(n2) < 1.0 / (1.0 + np.exp(-eta))).astype(float)
        try:
            fit = fit_mle(BERNOULLI, Dataset(X, y))
            errs.append(float(np.sum((fit.beta_hat - beta2) ** 2)))
        except Exception:
            nfail += 1
    errs = np.array(errs)
    return errs.mean(), np.median(errs), errs.max(), nfail

print(f"{'seed':>5} {'||b1-B1||':>9} {'max|b1|':>8} {'asymMSE*10':>10}")
rows = []
for master in range(1, 31):
    b1 = source_draw(master)
    a = asymptotic_mse(b1, SCALE_LARGE, N2)
    rows.append((master, b1, a))
    print(f"{master:>5} {np.linalg.norm(b1 - BETA1):>9.3f} {np.abs(b1).max():>8.3f} {10*a:>10.3f}")

a_true = asymptotic_mse(BETA1, SCALE_LARGE, N2)
print(f"\nasymptotic MSE*10 at true beta1: {10*a_true:.3f}  (paper MLE eMSE*10 = 0.964)")
vals = np.array([10 * r[2] for r in rows])
print(f"over 30 draws: min {vals.min():.3f} median {np.median(vals):.3f} max {vals.max():.3f}")

print("\nfinite-sample MLE eMSE (200 reps) for selected draws:")
order = np.argsort(vals)
for idx in [order[0], order[len(order) // 2], order[-1]]:
    master, b1, a = rows[idx]
    m, med, mx, nf = finite_sample_mse(b1, SCALE_LARGE, N2)
    print(f"seed {master:>3}: asym*10 {10*a:.3f}  finite mean*10 {10*m:.3f} median*10 {10*med:.3f} max*10 {10*mx:.1f} fails {nf}")

m, med, mx, nf = finite_sample_mse(BETA1, SCALE_LARGE, N2)
print(f"true B1: asym*10 {10*a_true:.3f}  finite mean*10 {10*m:.3f} median*10 {10*med:.3f} max*10 {10*mx:.1f} fails {nf}")
