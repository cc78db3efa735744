"""Default numerical tolerances, in one place so modules agree with each other.

All values assume "desk scale": matrices up to roughly 16 x 16 with entries of
order one.  Functions that accept a tolerance parameter default to these.
"""

# Relative singular-value threshold for rank decisions (floor 1.0 on the
# scale, so the threshold never collapses for tiny matrices).
RANK_TOL = 1e-10

# Two subspaces count as equal when their orthogonal projectors differ by
# less than this in Frobenius norm.
SUBSPACE_EQ_TOL = 1e-8

# Residual threshold for subspace containment checks.
CONTAINMENT_TOL = 1e-8

# Polynomial root clustering radius for multiplicity assignment.  Companion
# roots of an exact double zero already carry O(sqrt(eps)) ~ 1.5e-8 error, so
# the radius must sit well above that; multiplicity claims are re-validated
# against derivative jets afterwards.
ROOT_CLUSTER_TOL = 1e-6

# Trim polynomial coefficients below this times the largest coefficient.
COEFF_TRIM_TOL = 1e-12

# A point belongs to the resolvent set when its distance to the computed
# spectrum exceeds this.
RESOLVENT_DIST_TOL = 1e-7

# Eigenvalues of a pencil or matrix closer than this are merged into one
# spectral point.
SPECTRUM_CLUSTER_TOL = 1e-7

# User-supplied spectral labels are matched against computed points at this
# distance.
POINT_MATCH_TOL = 1e-7

# Hermitian-part residual threshold (relative).
HERMITIAN_TOL = 1e-8

# Positive semidefiniteness: eigenvalues above -PSD_TOL * ||H|| pass.
PSD_TOL = 1e-8

# Eigenvalues of Hermitian(G q(A)) below PSD_CUTOFF * ||H|| are treated as
# exact zeros when factoring.
PSD_CUTOFF = 1e-10

# Commutation check threshold (relative).
COMMUTANT_TOL = 1e-8

# Leading jet entries smaller than this count as zero (non-invertible jet).
JET_INVERT_TOL = 1e-12

# Imaginary parts below this (relative) count as real.
REALNESS_TOL = 1e-8
