"""Independent reference implementations used only by the tests.

Nothing here touches the package's linear algebra paths: the SVD is a
one-sided Jacobi sweep, the polar oracle goes through a symmetric
eigendecomposition. Agreement between these and the package is therefore a
genuine cross-check, not the same code run twice.
"""

import numpy as np

# Frozen reference constants, computed by hand / with the oracles below.
FIG2_RATIOS = (0.8, 0.7058823529411765, 0.6153846153846154)
FIG2_SATURATION_STEPS = (80, 71, 62)  # eta = 0.01, first step at the target
FIG5_SQRT_RATIOS = (0.9026709338484762, 0.8401680504168059, 0.7385489458759964)
DEPTH_GAP_L1 = 0.49382716049382713
DEPTH_GAP_L2 = 0.22222222222222232
# KL(uniform || normalized singular values) for k = 2, values (1, 0), floor
# 1e-15: log(0.5) - 0.5*(log(q_1) + log(q_2)) with q = (1, 1e-15)/(1 + 1e-15),
# which is 15*log(10)/2 - log(2) up to a 1e-15 correction.
KL_RANK_ONE_2 = 16.5762410168954


def jacobi_svd(A, tol=1e-14, max_sweeps=60):
    """One-sided Jacobi SVD: rotate column pairs until mutually orthogonal."""
    A = np.asarray(A, dtype=np.float64)
    transposed = A.shape[0] < A.shape[1]
    M = (A.T if transposed else A).copy()
    n, m = M.shape
    V = np.eye(m)
    for _ in range(max_sweeps):
        off = 0.0
        for i in range(m):
            for j in range(i + 1, m):
                pq = M[:, i] @ M[:, j]
                pp = M[:, i] @ M[:, i]
                qq = M[:, j] @ M[:, j]
                off = max(off, abs(pq))
                if abs(pq) <= tol * np.sqrt(pp * qq) or pq == 0.0:
                    continue
                theta = 0.5 * np.arctan2(2.0 * pq, pp - qq)
                c, s = np.cos(theta), np.sin(theta)
                Mi, Mj = M[:, i].copy(), M[:, j].copy()
                M[:, i] = c * Mi + s * Mj
                M[:, j] = -s * Mi + c * Mj
                Vi, Vj = V[:, i].copy(), V[:, j].copy()
                V[:, i] = c * Vi + s * Vj
                V[:, j] = -s * Vi + c * Vj
        if off <= tol:
            break
    s = np.linalg.norm(M, axis=0)
    order = np.argsort(-s)
    s = s[order]
    V = V[:, order]
    U = np.zeros((n, m))
    nonzero = s > 0
    U[:, nonzero] = M[:, order][:, nonzero] / s[nonzero]
    if transposed:
        return V, s, U.T
    return U, s, V.T


def polar_via_eig(A):
    """Polar factor A (AᵀA)^(-1/2) through a symmetric eigendecomposition."""
    A = np.asarray(A, dtype=np.float64)
    w, Q = np.linalg.eigh(A.T @ A)
    w = np.clip(w, 0.0, None)
    inv_sqrt = np.where(w > 1e-12 * w.max(), 1.0 / np.sqrt(np.where(w > 0, w, 1.0)), 0.0)
    return A @ (Q * inv_sqrt) @ Q.T


def gd_alpha(ratio, s_xx, eta, t):
    """Scalar Eq.-style GD coefficient, written independently."""
    out = 0.0
    for _ in range(int(t)):
        out = out + eta * (s_xx * ratio - s_xx * out)
    return out


def euler_ngf(s_yx, s_xx, t_end, n_steps):
    """Plain forward-Euler integration of the normalized-flow ODE."""
    s_yx = np.asarray(s_yx, dtype=np.float64)
    s_xx = np.asarray(s_xx, dtype=np.float64)
    alpha = np.zeros_like(s_yx)
    h = t_end / n_steps
    for _ in range(n_steps):
        r = s_yx - s_xx * alpha
        nrm = np.linalg.norm(r)
        if nrm < 1e-12:
            break
        alpha = alpha + h * r / nrm
    return alpha
