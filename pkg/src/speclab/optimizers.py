"""Update rules of the normalized-steepest-descent family plus Shampoo/Adam.

The dual-norm rules (NGD/SignGD/SpecGD and their momentum versions
NMD/Signum/Muon) normalize the gradient (or momentum buffer) in the
Frobenius, max, or spectral norm. Shampoo keeps Kronecker preconditioners
with exact eigendecomposition inverse roots and no grafting; Adam is the
standard bias-corrected elementwise rule. Gradient providers supply
population or finite-sample gradients for linear and deep linear models.
"""

from dataclasses import dataclass, replace
from typing import List, Optional

import numpy as np

from .dynamics import TrajectoryRecord
from .errors import NonFiniteUpdate, ShapeMismatch
from .kernels import polar_factor, random_orthonormal, sign_matrix

RULES = ("gd", "ngd", "signgd", "specgd", "nmd", "signum", "muon", "shampoo", "adam")
_MOMENTUM_RULES = {"nmd": "ngd", "signum": "signgd", "muon": "specgd"}
# Below this Frobenius norm a gradient is roundoff noise at a stationary
# point; normalizing it would produce an O(1) step in a random direction.
_GRAD_FLOOR = 1e-12


@dataclass(frozen=True)
class OptimizerConfig:
    rule: str
    eta: float
    beta: float = 0.9
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    shampoo_epsilon: float = 0.0
    polar_method: str = "exact_svd"
    polar_iterations: int = 5

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}")
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        for name in ("beta", "beta1", "beta2"):
            v = getattr(self, name)
            if not 0 <= v < 1:
                raise ValueError(f"{name} must lie in [0, 1)")
        if self.epsilon < 0 or self.shampoo_epsilon < 0:
            raise ValueError("stabilizers must be nonnegative")


@dataclass(frozen=True)
class OptimizerState:
    """Iterate plus accumulators; layers are a list even for linear models."""

    Ws: List[np.ndarray]
    M: Optional[List[np.ndarray]] = None
    Z: Optional[List[np.ndarray]] = None
    L_pre: Optional[List[np.ndarray]] = None
    R_pre: Optional[List[np.ndarray]] = None
    step: int = 0

    @property
    def W(self):
        if len(self.Ws) != 1:
            raise ValueError("W is only defined for single-layer states")
        return self.Ws[0]

    @classmethod
    def from_matrix(cls, W):
        return cls(Ws=[np.array(W, dtype=np.float64)])

    @classmethod
    def from_layers(cls, Ws):
        return cls(Ws=[np.array(W, dtype=np.float64) for W in Ws])


def _zeros_like_each(Ws):
    return [np.zeros_like(W) for W in Ws]


def _inverse_quarter_root(S, epsilon):
    """(S + eps I)^(-1/4) via eigendecomposition, pseudo-inverting zeros."""
    vals, vecs = np.linalg.eigh(S + epsilon * np.eye(S.shape[0]))
    vals = np.clip(vals, 0.0, None)
    tol = 1e-12 * max(vals.max(), _GRAD_FLOOR)
    inv = np.zeros_like(vals)
    np.power(vals, -0.25, out=inv, where=vals > tol)
    return (vecs * inv) @ vecs.T


def _direction(config, G, layer, state, new_M, new_Z, new_L, new_R):
    """The (unscaled) step Delta for one layer; W moves by -eta * Delta."""
    rule = config.rule
    if rule in _MOMENTUM_RULES:
        new_M[layer] = config.beta * state.M[layer] + (1 - config.beta) * G
        G = new_M[layer]
        rule = _MOMENTUM_RULES[rule]
    if np.linalg.norm(G) <= _GRAD_FLOOR:
        if config.rule in ("shampoo", "adam"):
            _update_adaptive_accumulators(config, G, layer, state, new_M, new_Z, new_L, new_R)
        return np.zeros_like(G)
    if rule == "gd":
        return G
    if rule == "ngd":
        return G / np.linalg.norm(G)
    if rule == "signgd":
        return sign_matrix(G)
    if rule == "specgd":
        return polar_factor(G, method=config.polar_method, iterations=config.polar_iterations)
    if rule == "shampoo":
        _update_adaptive_accumulators(config, G, layer, state, new_M, new_Z, new_L, new_R)
        left = _inverse_quarter_root(new_L[layer], config.shampoo_epsilon)
        right = _inverse_quarter_root(new_R[layer], config.shampoo_epsilon)
        return left @ new_M[layer] @ right
    if rule == "adam":
        _update_adaptive_accumulators(config, G, layer, state, new_M, new_Z, new_L, new_R)
        t = state.step
        m_hat = new_M[layer] / (1 - config.beta1 ** (t + 1))
        z_hat = new_Z[layer] / (1 - config.beta2 ** (t + 1))
        denom = np.sqrt(z_hat + config.epsilon)
        out = np.zeros_like(G)
        np.divide(m_hat, denom, out=out, where=denom > 0)
        return out
    raise AssertionError(rule)


def _update_adaptive_accumulators(config, G, layer, state, new_M, new_Z, new_L, new_R):
    if config.rule == "shampoo":
        new_M[layer] = config.beta1 * state.M[layer] + (1 - config.beta1) * G
        new_L[layer] = config.beta2 * state.L_pre[layer] + (1 - config.beta2) * (G @ G.T)
        new_R[layer] = config.beta2 * state.R_pre[layer] + (1 - config.beta2) * (G.T @ G)
    elif config.rule == "adam":
        new_M[layer] = config.beta1 * state.M[layer] + (1 - config.beta1) * G
        new_Z[layer] = config.beta2 * state.Z[layer] + (1 - config.beta2) * (G * G)


def _ensure_accumulators(config, state):
    kw = {}
    if config.rule in _MOMENTUM_RULES or config.rule in ("shampoo", "adam"):
        if state.M is None:
            kw["M"] = _zeros_like_each(state.Ws)
    if config.rule == "adam" and state.Z is None:
        kw["Z"] = _zeros_like_each(state.Ws)
    if config.rule == "shampoo":
        if state.L_pre is None:
            kw["L_pre"] = [np.zeros((W.shape[0], W.shape[0])) for W in state.Ws]
        if state.R_pre is None:
            kw["R_pre"] = [np.zeros((W.shape[1], W.shape[1])) for W in state.Ws]
    return replace(state, **kw) if kw else state


def step(config, state, grad):
    """Apply exactly one update; returns a new state, inputs untouched."""
    grads = grad if isinstance(grad, (list, tuple)) else [grad]
    if len(grads) != len(state.Ws):
        raise ShapeMismatch(f"{len(grads)} gradients for {len(state.Ws)} layers")
    state = _ensure_accumulators(config, state)
    new_M = list(state.M) if state.M is not None else None
    new_Z = list(state.Z) if state.Z is not None else None
    new_L = list(state.L_pre) if state.L_pre is not None else None
    new_R = list(state.R_pre) if state.R_pre is not None else None
    new_Ws = []
    for layer, (W, G) in enumerate(zip(state.Ws, grads)):
        if G.shape != W.shape:
            raise ShapeMismatch(f"gradient shape {G.shape} vs weight {W.shape}")
        delta = _direction(config, G, layer, state, new_M, new_Z, new_L, new_R)
        with np.errstate(over="ignore"):  # overflow turns into the error below
            W_next = W - config.eta * delta
        if not np.all(np.isfinite(W_next)):
            raise NonFiniteUpdate(state.step, config.rule)
        new_Ws.append(W_next)
    return OptimizerState(
        Ws=new_Ws, M=new_M, Z=new_Z, L_pre=new_L, R_pre=new_R, step=state.step + 1
    )


class PopulationSquaredLinear:
    """Population squared-loss gradients for a linear model on a profile.

    Knows the singular bases, so it can also project iterates onto the
    shared diagonal and clip SpecGD steps at the per-direction stationary
    point (the discrete dynamics saturate exactly there; an unclipped
    eta-sized final step would overshoot and oscillate around it).
    """

    def __init__(self, profile):
        self.profile = profile
        self.sigma_yx = profile.sigma_yx()
        self.sigma_xx = profile.sigma_xx()
        self._Vk = profile.V[:, : profile.k]

    def init_state(self):
        return OptimizerState.from_matrix(np.zeros((self.profile.k, self.profile.d)))

    def gradient(self, state):
        return [state.Ws[0] @ self.sigma_xx - self.sigma_yx]

    def project(self, state):
        """(alpha, max off-diagonal) of the iterate in the shared basis."""
        D = self.profile.U.T @ state.Ws[0] @ self._Vk
        alpha = np.diag(D).copy()
        off = float(np.max(np.abs(D - np.diag(alpha)))) if D.shape[0] > 1 else 0.0
        return alpha, off

    def stationary_targets(self):
        return self.profile.ratios

    def clip_layers(self, Ws):
        alpha = np.diag(self.profile.U.T @ Ws[0] @ self._Vk)
        excess = np.clip(alpha - self.profile.ratios, 0.0, None)
        if not np.any(excess > 0):
            return Ws
        W = Ws[0] - self.profile.U @ (excess[:, None] * self._Vk.T)
        return [W]


class PopulationSquaredDeep:
    """Layerwise population squared-loss gradients for depth-L linear models.

    Carries the per-layer bases of the orthonormal initialization, so layer
    diagonals can be read off and clipped at ratio^(1/L) exactly like the
    linear provider clips at ratio.
    """

    def __init__(self, profile, init):
        self.profile = profile
        self.init = init
        self.sigma_yx = profile.sigma_yx()
        self.sigma_xx = profile.sigma_xx()
        k, d, L = profile.k, profile.d, init.L
        if L == 2:
            d1 = init.d1
            if not k < d1 < d:
                raise ValueError("bilinear model needs k < d1 < d")
            Q = random_orthonormal(d1, d1, init.q_seed)
            # left/right bases per layer: layer diag = left.T @ W @ right
            self.lefts = [Q, profile.U]
            self.rights = [profile.V, Q]
        else:
            if k != d:
                raise ValueError("depth >= 3 closed form assumes k = d")
            Qs = [profile.V] + [
                random_orthonormal(d, d, init.q_seed + l) for l in range(1, L)
            ] + [profile.U]
            self.lefts = [Qs[l + 1] for l in range(L)]
            self.rights = [Qs[l] for l in range(L)]

    def init_state(self):
        s = self.init.init_scale
        Ws = []
        for left, right in zip(self.lefts, self.rights):
            r = min(left.shape[1], right.shape[1])
            Ws.append(s * left[:, :r] @ right[:, :r].T)
        return OptimizerState.from_layers(Ws)

    def gradient(self, state):
        Ws = state.Ws
        L = len(Ws)
        total = Ws[-1]
        for W in reversed(Ws[:-1]):
            total = total @ W
        E = total @ self.sigma_xx - self.sigma_yx  # k x d residual map
        grads = []
        for l in range(L):
            above = np.eye(Ws[-1].shape[0])
            for W in reversed(Ws[l + 1 :]):
                above = above @ W
            below = np.eye(Ws[0].shape[1])
            for W in Ws[:l]:
                below = W @ below
            grads.append(above.T @ E @ below.T)
        return grads

    def project(self, state):
        """Per-layer alpha (L x k) and the worst off-diagonal residual."""
        k = self.profile.k
        alphas = np.empty((len(state.Ws), k))
        off = 0.0
        for l, W in enumerate(state.Ws):
            D = self.lefts[l].T @ W @ self.rights[l]
            alphas[l] = np.diag(D)[:k]
            mask = np.eye(D.shape[0], D.shape[1], dtype=bool)
            rest = D[~mask]
            if rest.size:
                off = max(off, float(np.max(np.abs(rest))))
        return alphas, off

    def stationary_targets(self):
        return self.profile.ratios ** (1.0 / self.init.L)

    def clip_layers(self, Ws):
        k = self.profile.k
        targets = self.stationary_targets()
        out = []
        for l, W in enumerate(Ws):
            left, right = self.lefts[l][:, :k], self.rights[l][:, :k]
            alpha = np.diag(left.T @ W @ right)
            excess = np.clip(alpha - targets, 0.0, None)
            out.append(W - left @ (excess[:, None] * right.T) if np.any(excess > 0) else W)
        return out


class EmpiricalSquared:
    """Finite-sample squared-loss gradients on a fixed batch."""

    def __init__(self, batch):
        n = batch.n
        self.sigma_xx = batch.X.T @ batch.X / n
        self.sigma_yx = batch.Y.T @ batch.X / n

    def gradient(self, state):
        return [state.Ws[0] @ self.sigma_xx - self.sigma_yx]


def softmax_rows(Z):
    Z = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(Z)
    return E / E.sum(axis=1, keepdims=True)


class EmpiricalCrossEntropy:
    """Finite-sample softmax cross-entropy gradients on a fixed batch."""

    def __init__(self, batch):
        self.X = batch.X
        self.Y = batch.Y

    def gradient(self, state):
        P = softmax_rows(self.X @ state.Ws[0].T)
        return [(P - self.Y).T @ self.X / self.X.shape[0]]


def _clips_at_stationary(config, provider):
    if not hasattr(provider, "clip_layers"):
        return False
    return config.rule == "specgd" or (config.rule == "muon" and config.beta == 0.0)


def run(config, provider, init=None, steps=100, stop_grad_norm=1e-6, record_every=1):
    """Iterate the rule on the provider's gradients, recording diagnostics.

    The record at time t describes the iterate after t updates; row 0 is the
    initial state. Stops early once the gradient Frobenius norm falls below
    stop_grad_norm.
    """
    state = init if init is not None else provider.init_state()
    clip = _clips_at_stationary(config, provider)
    has_proj = hasattr(provider, "project")
    times, alphas, layer_alphas, offs, gnorms = [], [], [], [], []

    def record(t, gnorm):
        times.append(t)
        gnorms.append(gnorm)
        if has_proj:
            proj, off = provider.project(state)
            offs.append(off)
            if proj.ndim == 2:
                layer_alphas.append(proj)
                alphas.append(proj.prod(axis=0))
            else:
                alphas.append(proj)

    grads = provider.gradient(state)
    gnorm = float(np.sqrt(sum(np.sum(G * G) for G in grads)))
    record(0, gnorm)
    for t in range(1, steps + 1):
        if gnorm < stop_grad_norm:
            break
        state = step(config, state, grads)
        if clip:
            state = replace(state, Ws=provider.clip_layers(state.Ws))
        grads = provider.gradient(state)
        gnorm = float(np.sqrt(sum(np.sum(G * G) for G in grads)))
        if t % record_every == 0 or t == steps:
            record(t, gnorm)
    return (
        TrajectoryRecord(
            algo=config.rule,
            times=np.asarray(times, dtype=np.float64),
            alpha=np.asarray(alphas) if alphas else None,
            layer_alpha=np.asarray(layer_alphas) if layer_alphas else None,
            grad_norm=np.asarray(gnorms),
            offdiag_residual=np.asarray(offs) if offs else None,
        ),
        state,
    )
