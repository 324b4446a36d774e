"""Dense-matrix primitives: SVD, polar factor, norms, sign, random bases.

Matrices are plain float64 numpy arrays throughout the package.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NonConvergence, ZeroMatrix

ZERO_FLOOR = 1e-300
DEFAULT_RANK_TOL = 1e-10

# Quintic polar schedule p(x) = a*x + b*x^3 + c*x^5, applied in sequence.
# The first four steps are the greedy minimax quintics that expand the
# singular-value interval [0.009, 1] as fast as possible while never
# overshooting 1; the fifth is the symmetric contraction step with the
# recentering of the interval [0.96488, 1] folded into its coefficients.
# Five steps map every singular value in [0.009, 1] to within 1.5e-5 of 1.
_POLAR_SCHEDULE = (
    (4.221291615, -12.341237468, 9.119945853),
    (4.104796618, -11.400795408, 8.295998790),
    (3.640191282, -8.126857273, 5.486665992),
    (2.532647197, -2.956111144, 1.423463947),
    (1.908512939473949, -1.3182310079954767, 0.40973253548591976),
)
# Past five steps, keep polishing with the plain symmetric quintic.
_POLAR_POLISH = (15.0 / 8.0, -10.0 / 8.0, 3.0 / 8.0)

NS_RESIDUAL_THRESHOLD = 0.3


@dataclass(frozen=True)
class SvdFactors:
    """Truncated SVD A = U @ diag(S) @ V.T with strictly positive S."""

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray

    @property
    def rank(self):
        return self.S.size


def _as_matrix(A):
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise DimensionError(f"expected a 2-d matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix contains non-finite entries")
    return A


def _check_nonzero(A):
    if np.max(np.abs(A)) <= ZERO_FLOOR:
        raise ZeroMatrix("matrix is numerically zero (all |entries| <= 1e-300)")


def svd_truncated(A, rank_tolerance=DEFAULT_RANK_TOL):
    """SVD keeping singular values above rank_tolerance * sigma_max."""
    A = _as_matrix(A)
    _check_nonzero(A)
    U, S, Vt = np.linalg.svd(A, full_matrices=False)
    keep = S > rank_tolerance * S[0]
    return SvdFactors(U=U[:, keep], S=S[keep], V=Vt[keep].T)


def norm(A, which="frobenius"):
    """Matrix norm: frobenius, max_abs, spectral, or nuclear."""
    A = _as_matrix(A)
    if which == "frobenius":
        return float(np.linalg.norm(A))
    if which == "max_abs":
        return float(np.max(np.abs(A)))
    if which == "spectral":
        return float(np.linalg.norm(A, 2))
    if which == "nuclear":
        return float(np.linalg.svd(A, compute_uv=False).sum())
    raise ValueError(f"unknown norm {which!r}")


def sign_matrix(A):
    """Elementwise sign with sign(0) = 0."""
    return np.sign(_as_matrix(A))


def spectral_norm_upper(A, squarings=5):
    """Certain upper bound on the spectral norm, tight to a few percent.

    Frobenius norm of the repeatedly squared Gram matrix: with k squarings
    the bound is (sum_i s_i^(2^(k+2)))^(1/2^(k+2)), which exceeds s_max by
    at most rank^(1/2^(k+2)). Unlike power iteration this can never come
    out below the true norm, which the polar schedule depends on.
    """
    A = _as_matrix(A)
    f = np.linalg.norm(A)
    if f == 0.0:
        return 0.0
    B = A / f
    G = B.T @ B if A.shape[1] <= A.shape[0] else B @ B.T
    for _ in range(squarings):
        G = G @ G
    return f * float(np.linalg.norm(G)) ** (1.0 / 2 ** (squarings + 1))


def _newton_schulz(A, iterations):
    X = A / spectral_norm_upper(A)
    tall = X.shape[0] >= X.shape[1]
    for i in range(iterations):
        a, b, c = _POLAR_SCHEDULE[i] if i < len(_POLAR_SCHEDULE) else _POLAR_POLISH
        if tall:
            S = X.T @ X
            X = a * X + b * (X @ S) + c * (X @ S @ S)
        else:
            S = X @ X.T
            X = a * X + b * (S @ X) + c * (S @ S @ X)
    return X


def polar_factor(A, method="exact_svd", iterations=5, rank_tolerance=DEFAULT_RANK_TOL):
    """Partial isometry U @ V.T from the truncated SVD of A.

    method="exact_svd" computes it directly; method="newton_schulz" runs the
    quintic iteration (SVD-free apart from the convergence diagnostic) and
    raises NonConvergence if the result is not close to a partial isometry.
    """
    A = _as_matrix(A)
    _check_nonzero(A)
    if method == "exact_svd":
        f = svd_truncated(A, rank_tolerance)
        return f.U @ f.V.T
    if method == "newton_schulz":
        P = _newton_schulz(A, iterations)
        f = svd_truncated(A, rank_tolerance)
        projector = f.V @ f.V.T
        residual = np.linalg.norm(P.T @ P - projector)
        if residual >= NS_RESIDUAL_THRESHOLD:
            raise NonConvergence(residual, iterations)
        return P
    raise ValueError(f"unknown polar method {method!r}")


def random_orthonormal(n, m, seed):
    """n x m matrix with orthonormal columns, deterministic in seed."""
    if m > n:
        raise DimensionError(f"cannot fit {m} orthonormal columns in R^{n}")
    rng = np.random.Generator(np.random.Philox(seed))
    Q, R = np.linalg.qr(rng.standard_normal((n, m)))
    # Fix the gauge so the factorization (hence the output) is unique.
    return Q * np.sign(np.diag(R))
