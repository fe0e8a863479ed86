"""Reference numbers frozen from independent computations.

Each value was produced by code that shares nothing with the package:
a hand-written potential with scipy.optimize.root on a finite-difference
gradient, finite-difference Hessians (h = 1e-4), and numpy eigenvalues of the
assembled linearization.  They are stored to the accuracy those methods
support.
"""

import math

SQRT3 = math.sqrt(3.0)

# linear system with V'' = I: periods 2 pi / |Im lambda| of J_2 A, from numpy.linalg.eigvals
T_MINUS_11 = 2.602580569137144
T_PLUS_11 = 15.168951183496317

# equal masses, origin
ORIGIN_BETA = -1.0 - 3.0 * SQRT3 / 2.0  # FD gave -3.59807626 on both axes
ORIGIN_BETA3 = 3.0 * SQRT3  # FD gave 5.19615231
VERTICAL_PERIOD_ORIGIN = 2.0 * math.pi / math.sqrt(3.0 * SQRT3)

# equal masses, representatives on the negative/positive x axis
# (x, beta1, beta2, beta3); FD accuracy about 1e-6
SADDLE_T = (-0.4138879326, -10.74326219, 2.87526252, 5.86799871)
MAX_O = (-1.6197896102, -2.26385506, -1.05361977, 1.31747488)
SADDLE_D = (2.0438171902, -4.34733147, 0.64585253, 1.70147869)
