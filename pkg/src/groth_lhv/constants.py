"""Shared numerical tolerances.

Every tolerance used by the package lives here so that tests and
library code refer to the same named values.
"""

#: norm / Hermiticity / identity checks on freshly built objects
STRUCT_TOL = 1e-12
#: accumulated error of tensor-product constructions (d <= 64)
OPERATOR_TOL = 1e-10
#: imaginary residue allowed on provably real traces before it is an error
IMAG_TOL = 1e-10
#: smallest eigenvalue accepted for a density matrix
PSD_TOL = 1e-10
#: resultant norm below which a see-saw step keeps the previous vector
ZERO_RESULTANT = 1e-14
#: see-saw stopping rule
SEESAW_GAIN_TOL = 1e-12
SEESAW_MAX_ITER = 10_000
#: root residual |f(c) - 1| demanded from every normalization root
ROOT_RESIDUAL = 1e-10
#: absolute tolerance of the quadratures feeding the roots
QUAD_TOL = 1e-12
#: Monte Carlo acceptance width, in standard errors
MC_SIGMAS = 4.0
#: exhaustive local-bound enumeration cap (settings on the smaller side)
LOCAL_BOUND_CAP = 24
#: samples per random-stream block in Monte Carlo estimation
MC_BLOCK = 50_000
