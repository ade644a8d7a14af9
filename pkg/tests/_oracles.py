"""Frozen reference values. GENERATED by make_oracles.py; do not edit."""

import numpy as np

EXPIT_PLUS_40 = 1.0

EXPIT_MINUS_40 = 4.248354255291589e-18

Z_975 = 1.9599639845400543

GRAM_5X50 = np.array([[1.0, 0.0248629866849533, -0.14840433504627273, 0.1408134240368505,
  0.17599801559082684],
 [0.0248629866849533, 1.1931692366454196, 0.1255130183887373, 0.11081996702421279,
  0.09665243868838198],
 [-0.14840433504627273, 0.1255130183887373, 1.0885332470147746,
  0.11189659457367071, -0.028366633433276375],
 [0.1408134240368505, 0.11081996702421279, 0.11189659457367071, 1.1379221107888657,
  0.1519027979936989],
 [0.17599801559082684, 0.09665243868838198, -0.028366633433276375,
  0.1519027979936989, 0.8340854517080849]])

WINFO_TOY_FD = np.array([[0.21663999411059007, 0.046436100792357486, -0.010952422446752761],
 [0.046436100793745265, 0.28327617475759626, -0.06949631393415867],
 [-0.010952422449528319, -0.06949631393415867, 0.19765765963269952]])

KL_TOY = 0.4419956406791769

GA_SOURCE_BETA = np.array([0.6406761692032974, -0.6443333463296399, 0.6872785955829863, -0.32471963152034367])

GA_SOURCE_SIGMA2 = 0.9456755693295216

GA_TARGET_BETA = np.array([0.4730469694105083, -0.9906316716081125, 0.9749246125544957, -0.07091924715801773])

GA_TARGET_SIGMA2 = 0.7308636992936234

GA_TARGET_BSE = np.array([0.16538066514237887, 0.1851816172356215, 0.19252644682412126, 0.18109822115762259])

GA_OBJ_AT_X = np.float64(0.9651587344759264)

GA_BETA_X = np.array([0.7906761692032974, -0.8443333463296399, 0.7872785955829863, -0.2747196315203437])

GA_LAM_X = 0.7

GA_PSI_AT_X = np.array([-0.3971675050078582, 0.0007677373593125564, 0.024070877451925245,
 0.15381089869863157])

GA_SHRINK_LAM05 = np.array([0.5248067863767276, -0.9063894702246719, 0.8940988816073095, -0.1636760838926364])

GA_DELTA_SQ = np.array([[0.02288139317683387, 0.04959499553958608, -0.04029281977017287,
  -0.037174395125861646],
 [0.04959499553958608, 0.10749623344883716, -0.0873339399107157,
  -0.08057481230297311],
 [-0.04029281977017287, -0.08733393991071571, 0.07095334241602684,
  0.06546197564526082],
 [-0.037174395125861646, -0.08057481230297313, 0.06546197564526084,
  0.060395608007506235]])

GA_MSE_L03 = 0.080467680796207

GA_MSE_L17 = 0.1024249371111963

GA_MSE_AT0 = 0.13150599419811224

GA_LAMBDA_DENSE = 0.5769059259059766

GA_LAMBDA_DENSE_STEP = 1.0001266501995734

GA_LAMBDA_BOUND = 0.09256413044330804

GA_SANDWICH_L07 = np.array([[0.008743367463267164, 0.0013888997882634205, -0.001751570862170396,
  -0.0006274588684546871],
 [0.0013888997882634208, 0.011900138524106168, -0.0019193922953188206,
  -0.0008853416599613989],
 [-0.0017515708621703954, -0.0019193922953188206, 0.011452999512715827,
  0.0003286688395062444],
 [-0.000627458868454687, -0.0008853416599613989, 0.0003286688395062444,
  0.007067640671245263]])

GA_COS_LAM1 = np.array([0.5326559213083866, -0.8793750601156618, 0.8783330137076537, -0.16527952119162304])

GA_COS_LIMIT = np.array([0.5650732574072226, -0.8280550594627766, 0.8289854477015988, -0.2224466424141333])

GA_COS_LAMBDA_DENSE = 1.2909368559896015

GA_COS_LAMBDA_DENSE_STEP = 1.0001266501995734

GA_POOLED_BETA = np.array([0.5650732574072227, -0.8280550594627774, 0.8289854477015985, -0.22244664241413326])

GB_LAMBDA_DENSE = 2.3339148107655876

GB_LAMBDA_DENSE_STEP = 1.0001266501995734

BA_SOURCE_BETA = np.array([0.16065790826934467, -1.4896584448470334, -0.38835187531209237])

BA_TARGET_BETA = np.array([0.3881792139144886, -2.3100179468374753, -0.24323075839089123])

BA_TARGET_BSE = np.array([0.27891929477892097, 0.519628557235672, 0.2801091007409374])

BA_POOLED_BETA = np.array([0.2394757375723716, -1.7673151775527078, -0.3241218334007644])

BA_INFO_WEIGHTED = np.array([0.4377777177560992, -2.0748820156487913, -0.148104013002118])

BB_SOURCE_BETA = np.array([-2.0819826307341343, -0.22187557837206298, -0.2202551638031427,
 -1.3540787567454047])

BB_TARGET_BETA = np.array([-3.6921955295511877, -1.2458505111182285, -0.7230896247004142, -1.777535672670684])

BB_AMSE_LAM1 = 589.1703019614799

BB_LAMBDA_DENSE = 0.05684797511049436

BB_LAMBDA_DENSE_STEP = 1.0001266501995734

BB_LAMBDA_BOUND = 0.003886280495534764

BB_SHRINK_LAM05 = np.array([-2.757188502686548, -0.5789636112934688, -0.4946394814351091, -1.4355968574715325])

BC_SOURCE_BETA = np.array([-1.0471444290632206, -0.016226929931446588])

BC_TARGET_BETA = np.array([-0.6485087280977639, 0.9930474463011241])

BC_GRID_ARGMAX = np.array([-0.728508728097764, 0.7105474463011241])

BC_GRID_STEP = 0.0024999999999999467
