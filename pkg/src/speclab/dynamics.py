"""Analytic training-trajectory oracles for linear, bilinear and deep models.

Everything here is a function of the spectral profile alone: the diagonal
coefficients alpha_c(t) of the iterate in the shared singular basis evolve
independently per class direction, and each optimizer family has its own
closed form (or, for normalized gradient flow, a cheap ODE integration).
"""

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import StepSizeTooLarge

# Slack on the saturation-indicator comparison so float-boundary cases do
# not flap between the linear and saturated branches.
_BOUNDARY_SLACK = 1e-12
_NGF_CONVERGED = 1e-12


@dataclass(frozen=True)
class TrajectoryRecord:
    algo: str
    times: np.ndarray  # strictly increasing steps or continuous times
    alpha: np.ndarray  # len(times) x k
    layer_alpha: Optional[np.ndarray] = None  # len(times) x L x k
    losses: Optional[np.ndarray] = None  # len(times) x k
    grad_norm: Optional[np.ndarray] = None
    offdiag_residual: Optional[np.ndarray] = None


@dataclass(frozen=True)
class DeepInitSpec:
    """Depth, init scale e^{-delta}, and the inner width for bilinear models."""

    L: int
    delta: float
    d1: int = 0  # only meaningful for L = 2
    q_seed: int = 0

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("depth L must be >= 1")
        if self.delta <= 0:
            raise ValueError("init scale requires delta > 0")

    @property
    def init_scale(self):
        return math.exp(-self.delta)


def _check_eta(eta, bound, what):
    if eta >= bound:
        raise StepSizeTooLarge(eta, bound, what)


def gd_discrete(profile, eta, t):
    """Exact discrete GD coefficients at integer step t."""
    _check_eta(eta, 1.0 / profile.s_xx.max(), "GD contraction 1 - eta*s_xx > 0")
    sxx = profile.s_xx[: profile.k]
    return profile.ratios * (1.0 - (1.0 - eta * sxx) ** t)


def gf(profile, t):
    """Gradient-flow coefficients at continuous time t."""
    return profile.ratios * (1.0 - np.exp(-t * profile.s_xx[: profile.k]))


def specgd_discrete(profile, eta, t):
    """Discrete SpecGD coefficients: eta per step until saturation."""
    _check_eta(eta, profile.ratios.min(), "SpecGD condition eta < min ratio")
    linear = t <= profile.ratios / eta + _BOUNDARY_SLACK
    return np.where(linear, eta * t, profile.ratios)


def specgf(profile, t):
    """Spectral gradient flow: common linear ramp, then saturation."""
    return np.minimum(float(t), profile.ratios)


def ngf_derivative(profile, alpha):
    """Right-hand side of the normalized-gradient-flow ODE."""
    r = profile.s_yx - profile.s_xx[: profile.k] * alpha
    R = np.linalg.norm(r)
    if R < _NGF_CONVERGED:
        return np.zeros_like(alpha)
    return r / R


def ngf_integrate(profile, t_grid, dt=None):
    """RK4 integration of the normalized-gradient-flow coefficients."""
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if t_grid.size and np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    if dt is None:
        dt = 1e-4 * profile.t_star
    if dt <= 0:
        raise ValueError("dt must be positive")
    alpha = np.zeros(profile.k)
    t = 0.0
    out = np.empty((t_grid.size, profile.k))
    for i, target in enumerate(t_grid):
        span = target - t
        if span < 0:
            raise ValueError("t_grid must start at or after 0")
        n = max(1, math.ceil(span / dt)) if span > 0 else 0
        h = span / n if n else 0.0
        for _ in range(n):
            k1 = ngf_derivative(profile, alpha)
            k2 = ngf_derivative(profile, alpha + 0.5 * h * k1)
            k3 = ngf_derivative(profile, alpha + 0.5 * h * k2)
            k4 = ngf_derivative(profile, alpha + h * k3)
            alpha = alpha + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t = target
        out[i] = alpha
    return TrajectoryRecord(algo="ngf", times=t_grid, alpha=out)


def _deep_diagonal(profile, init, eta, t, L):
    scale = init.init_scale
    if scale > 0.01 * eta:
        warnings.warn(
            f"init scale e^-delta = {scale:.3g} is not small next to eta = {eta}; "
            "the closed form assumes a negligible transient",
            stacklevel=3,
        )
    target = profile.ratios ** (1.0 / L)
    linear = t <= (target - scale) / eta + _BOUNDARY_SLACK
    return np.where(linear, eta * t + scale, target)


def bilinear_specgd(profile, init, eta, t):
    """Shared layer diagonals of a two-layer model under layerwise SpecGD."""
    if init.L != 2:
        raise ValueError("bilinear closed form is for L = 2")
    a = _deep_diagonal(profile, init, eta, t, L=2)
    return a, a.copy()


def deep_specgd(profile, init, eta, t):
    """Per-layer diagonals for depth L; every layer shares the same ramp."""
    if init.L == 1:
        # Depth 1 with the additive init offset degenerates to plain SpecGD
        # once the offset underflows; keep the offset for consistency.
        a = _deep_diagonal(profile, init, eta, t, L=1)
        return a[None, :]
    a = _deep_diagonal(profile, init, eta, t, L=init.L)
    return np.tile(a, (init.L, 1))


def saturation_gap(profile, L):
    """Relative spread of saturation times, (ratio_max/ratio_min)^(1/L) - 1."""
    if L < 1:
        raise ValueError("depth L must be >= 1")
    r = profile.ratios
    return float((r.max() / r.min()) ** (1.0 / L) - 1.0)


def saturation_gap_imbalance_form(profile, L):
    """The same gap written in terms of SNR and the extreme priors."""
    snr = profile.snr
    p_m, p_M = profile.priors.min(), profile.priors.max()
    return float(((snr + 1.0 / p_m) / (snr + 1.0 / p_M)) ** (1.0 / L) - 1.0)


def gd_epsilon_time(profile, eta, epsilon, c):
    """Steps for discrete GD to bring component c within epsilon of terminal."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    sxx = profile.s_xx[c]
    _check_eta(eta, 1.0 / sxx, "GD contraction 1 - eta*s_xx > 0")
    return math.log(epsilon) / math.log(1.0 - eta * sxx)
