"""Gaussian-mixture class-imbalance data model.

Classes y have priors p_c; inputs are x | y ~ N(mu_y, sigma_x^2 I_d) with
orthonormal class means of common norm mu. The population moment matrices
are then jointly diagonalizable, with spectra s_yx[c] = mu * p_c and
s_xx[c] = mu^2 * p_c + sigma_x^2 (and sigma_x^2 on the noise directions).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidScheme, ZeroMatrix
from .kernels import random_orthonormal, svd_truncated


def make_priors(scheme, values=None, k=None, ratio=None, majority_count=None):
    """Build a prior vector: explicit values, step imbalance, or zipf 1/c."""
    if scheme == "explicit":
        p = np.asarray(values, dtype=np.float64)
        if p.ndim != 1 or p.size < 1 or np.any(p <= 0):
            raise InvalidScheme("explicit priors must be a positive vector")
        return p / p.sum()
    if scheme == "zipf":
        if not k or k < 1:
            raise InvalidScheme("zipf needs a positive class count")
        p = 1.0 / np.arange(1, k + 1)
        return p / p.sum()
    if scheme == "step":
        if not k or k < 1 or ratio is None or ratio <= 0:
            raise InvalidScheme("step needs a positive class count and ratio")
        if majority_count is None or not (0 < majority_count < k):
            raise InvalidScheme("majority_count must be in (0, k)")
        p = np.ones(k)
        p[:majority_count] = ratio
        return p / p.sum()
    raise InvalidScheme(f"unknown prior scheme {scheme!r}")


@dataclass(frozen=True)
class DataModelSpec:
    k: int
    d: int
    mu: float
    sigma2: float
    priors: np.ndarray
    mean_seed: int = 0
    mean_mode: str = "exact_orthonormal"

    def __post_init__(self):
        priors = np.asarray(self.priors, dtype=np.float64)
        object.__setattr__(self, "priors", priors)
        if self.d < self.k:
            raise ValueError(f"need d >= k, got d={self.d}, k={self.k}")
        if priors.size != self.k or np.any(priors <= 0):
            raise ValueError("priors must be strictly positive, length k")
        if abs(priors.sum() - 1.0) > 1e-12:
            raise ValueError(f"priors sum to {priors.sum()!r}, not 1")
        if self.mu <= 0 or self.sigma2 <= 0:
            raise ValueError("mu and sigma2 must be positive")
        if self.mean_mode not in ("exact_orthonormal", "normalized_gaussian"):
            raise ValueError(f"unknown mean_mode {self.mean_mode!r}")

    @property
    def snr(self):
        return self.mu**2 / self.sigma2


def class_means(spec):
    """k x d matrix of class means, row c = mean of user class c."""
    if spec.mean_mode == "exact_orthonormal":
        return spec.mu * random_orthonormal(spec.d, spec.k, spec.mean_seed).T
    rng = np.random.Generator(np.random.Philox(spec.mean_seed))
    M = rng.standard_normal((spec.k, spec.d))
    return spec.mu * M / np.linalg.norm(M, axis=1, keepdims=True)


@dataclass(frozen=True)
class SpectralProfile:
    """Joint spectra of the population moments, sorted nonincreasing.

    Spectral index c corresponds to user class perm[c]; U is the identity
    composed with that sorting permutation, V's first k columns are the
    sorted class means divided by mu.
    """

    s_yx: np.ndarray
    s_xx: np.ndarray
    U: np.ndarray
    V: np.ndarray
    snr: float
    mu: float
    sigma2: float
    priors: np.ndarray  # sorted nonincreasing
    perm: np.ndarray  # spectral index -> user class index

    @property
    def k(self):
        return self.s_yx.size

    @property
    def d(self):
        return self.s_xx.size

    @property
    def ratios(self):
        """Terminal coefficients s_yx / s_xx per class direction."""
        return self.s_yx / self.s_xx[: self.k]

    @property
    def t_star(self):
        """Saturation time of the minority component under SpecGF."""
        return float(self.ratios.min())

    @property
    def minority_index(self):
        return int(np.argmin(self.priors))

    @property
    def majority_index(self):
        return int(np.argmax(self.priors))

    def sigma_yx(self):
        return self.U @ (self.s_yx[:, None] * self.V[:, : self.k].T)

    def sigma_xx(self):
        return (self.V * self.s_xx) @ self.V.T


def _orthonormal_completion(Vk, seed):
    """Extend d x k orthonormal columns to a full d x d orthonormal basis."""
    d, k = Vk.shape
    if k == d:
        return Vk
    rng = np.random.Generator(np.random.Philox(seed))
    G = rng.standard_normal((d, d - k))
    G -= Vk @ (Vk.T @ G)
    Q, R = np.linalg.qr(G)
    return np.hstack([Vk, Q * np.sign(np.diag(R))])


def population_spectra(spec):
    """Lemma-style joint spectra of the population moment matrices."""
    perm = np.argsort(-spec.priors, kind="stable")
    p = spec.priors[perm]
    s_yx = spec.mu * p
    s_xx = np.full(spec.d, spec.sigma2)
    s_xx[: spec.k] += spec.mu**2 * p
    U = np.eye(spec.k)[perm].T  # column c = e_{perm[c]}
    means = class_means(spec)[perm]
    Vk = means.T / spec.mu
    V = _orthonormal_completion(Vk, spec.mean_seed + 1)
    return SpectralProfile(
        s_yx=s_yx,
        s_xx=s_xx,
        U=U,
        V=V,
        snr=spec.snr,
        mu=spec.mu,
        sigma2=spec.sigma2,
        priors=p,
        perm=perm,
    )


@dataclass(frozen=True)
class SampleBatch:
    X: np.ndarray  # n x d
    Y: np.ndarray  # n x k one-hot
    labels: np.ndarray  # n, user class indices

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def k(self):
        return self.Y.shape[1]


def sample(spec, n, seed):
    """Draw n labeled points from the mixture, deterministic in seed."""
    rng = np.random.Generator(np.random.Philox(seed))
    labels = rng.choice(spec.k, size=n, p=spec.priors)
    means = class_means(spec)
    X = means[labels] + np.sqrt(spec.sigma2) * rng.standard_normal((n, spec.d))
    Y = np.eye(spec.k)[labels]
    return SampleBatch(X=X, Y=Y, labels=labels)


def empirical_moments(batch):
    """Plug-in moment matrices (Sigma_xx, Sigma_yx) of a batch."""
    n = batch.n
    return batch.X.T @ batch.X / n, batch.Y.T @ batch.X / n


@dataclass(frozen=True)
class JointnessReport:
    residual_norm: float
    sigma_xx_norm: float

    @property
    def ratio(self):
        return self.residual_norm / self.sigma_xx_norm


def jointness_residual(sigma_xx, sigma_yx):
    """How far Sigma_xx is from diagonal in Sigma_yx's right singular basis."""
    if np.max(np.abs(sigma_yx)) <= 1e-300:
        raise ZeroMatrix("cross moment is numerically zero")
    V = svd_truncated(sigma_yx).V
    B = V.T @ sigma_xx @ V
    B = B - np.diag(np.diag(B))
    return JointnessReport(
        residual_norm=float(np.linalg.norm(B)),
        sigma_xx_norm=float(np.linalg.norm(sigma_xx)),
    )
