"""Verification suites: reductions, dynamics, theorems, depth, jointness.

Each suite returns a list of Check records (name, measured value,
tolerance, verdict) so the CLI can print one line per check and exit
nonzero when anything fails.
"""

from dataclasses import dataclass

import numpy as np

from . import dynamics
from .data import (
    DataModelSpec,
    empirical_moments,
    jointness_residual,
    population_spectra,
    sample,
)
from .metrics import check_conditions, gap_verify
from .optimizers import (
    OptimizerConfig,
    OptimizerState,
    PopulationSquaredDeep,
    PopulationSquaredLinear,
    run,
    step,
)

SUITES = ("reductions", "dynamics", "theorems", "depth", "jointness", "all")


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool

    def line(self):
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict}  {self.name}: measured {self.value:.3e} vs tolerance {self.tolerance:.3e}"


def _upper_check(name, value, tol):
    return Check(name=name, value=float(value), tolerance=tol, passed=value < tol)


def fig2_spec():
    return DataModelSpec(
        k=3, d=3, mu=1.0, sigma2=0.125, priors=np.array([0.5, 0.3, 0.2])
    )


def fig5_spec(d=6):
    # The bilinear closed form needs k < d1 < d, so the ambient dimension is
    # widened; the class spectra depend only on the priors and noise level.
    return DataModelSpec(
        k=3, d=d, mu=1.0, sigma2=0.125, priors=np.array([0.55, 0.3, 0.15])
    )


def designated_theorem_spec():
    priors = np.concatenate([[0.865], np.full(9, 0.015)])
    return DataModelSpec(k=10, d=10, mu=1.0, sigma2=0.25, priors=priors)


def verify_reductions(steps=50, seed=123):
    """Momentum/preconditioner rules at beta = 0 match their base rules."""
    pairs = [
        ("shampoo->specgd", OptimizerConfig("shampoo", 0.1, beta1=0.0, beta2=0.0, shampoo_epsilon=0.0), OptimizerConfig("specgd", 0.1)),
        ("adam->signgd", OptimizerConfig("adam", 0.1, beta1=0.0, beta2=0.0, epsilon=0.0), OptimizerConfig("signgd", 0.1)),
        ("muon(beta=0)->specgd", OptimizerConfig("muon", 0.1, beta=0.0), OptimizerConfig("specgd", 0.1)),
        ("signum(beta=0)->signgd", OptimizerConfig("signum", 0.1, beta=0.0), OptimizerConfig("signgd", 0.1)),
    ]
    checks = []
    for name, cfg_a, cfg_b in pairs:
        worst = 0.0
        for shape in ((4, 3), (16, 16), (5, 16)):
            rng = np.random.Generator(np.random.Philox(seed))
            a = OptimizerState.from_matrix(np.zeros(shape))
            b = OptimizerState.from_matrix(np.zeros(shape))
            for _ in range(steps):
                G = rng.standard_normal(shape)
                a = step(cfg_a, a, G)
                b = step(cfg_b, b, G)
                worst = max(worst, float(np.max(np.abs(a.Ws[0] - b.Ws[0]))))
        checks.append(_upper_check(f"reduction {name} max-abs over {steps} steps", worst, 1e-6))
    return checks


def verify_dynamics(eta=0.01, steps=200, corrupt_gd_sign=False):
    """Simulated GD / SpecGD against their closed forms on the Fig. 2 profile.

    corrupt_gd_sign flips the sign inside the GD closed form; it exists so
    the test suite can confirm this check actually detects a wrong formula.
    """
    profile = population_spectra(fig2_spec())
    provider = PopulationSquaredLinear(profile)
    checks = []
    for rule, oracle in (("gd", dynamics.gd_discrete), ("specgd", dynamics.specgd_discrete)):
        record, _ = run(OptimizerConfig(rule, eta), provider, steps=steps, stop_grad_norm=0.0)
        worst = 0.0
        for i, t in enumerate(record.times):
            ref = oracle(profile, eta, int(t))
            if corrupt_gd_sign and rule == "gd":
                ref = -ref
            worst = max(worst, float(np.max(np.abs(record.alpha[i] - ref))))
        checks.append(_upper_check(f"{rule} simulated vs closed form", worst, 1e-9))
        checks.append(
            _upper_check(f"{rule} off-diagonal residual", float(record.offdiag_residual.max()), 1e-9)
        )
    # Equal-rate law: every unsaturated component gains exactly eta per step.
    record, _ = run(OptimizerConfig("specgd", eta), provider, steps=steps, stop_grad_norm=0.0)
    inc = np.diff(record.alpha, axis=0)
    # still below the stationary value after the step, so no clip occurred
    unsat = record.alpha[1:] < profile.ratios - 1e-9
    worst = float(np.max(np.abs(inc[unsat] - eta))) if unsat.any() else 0.0
    checks.append(_upper_check("specgd equal-rate increment deviation", worst, 1e-12))
    # Saturation steps forced by the indicator: 80 exactly, then (70,71), (61,62).
    a = record.alpha
    sat_ok = (
        abs(a[80, 0] - profile.ratios[0]) < 1e-12
        and a[79, 0] < profile.ratios[0] - 1e-9
        and a[70, 1] < profile.ratios[1] - 1e-9
        and abs(a[71, 1] - profile.ratios[1]) < 1e-12
        and a[61, 2] < profile.ratios[2] - 1e-9
        and abs(a[62, 2] - profile.ratios[2]) < 1e-12
    )
    checks.append(Check("specgd saturation steps 80 / (70,71) / (61,62)", float(sat_ok), 1.0, sat_ok))
    return checks


def verify_theorems(grid_points=50):
    """Condition checks and loss-gap bounds on the designated profile."""
    profile = population_spectra(designated_theorem_spec())
    t_grid = np.linspace(profile.t_star / grid_points, profile.t_star, grid_points)
    checks = []
    for theorem in ("B1_minority", "B1_balanced", "B4_minority", "B4_balanced"):
        cond = check_conditions(profile, theorem)
        checks.append(
            Check(f"{theorem} conditions margin", cond.margin, 0.0, cond.margin > 0)
        )
        report = gap_verify(profile, theorem, t_grid)
        slack = float(np.min(report.gap - report.bound))
        checks.append(
            Check(f"{theorem} gap >= bound on {grid_points}-point grid", slack, -1e-9, bool(report.holds.all()))
        )
    return checks


def theorem_gap_rows(grid_points=50):
    """Gap and bound values per theorem, for the verify CSV export."""
    profile = population_spectra(designated_theorem_spec())
    t_grid = np.linspace(profile.t_star / grid_points, profile.t_star, grid_points)
    rows = []
    for theorem in ("B1_minority", "B1_balanced", "B4_minority", "B4_balanced"):
        report = gap_verify(profile, theorem, t_grid, override=True)
        for t, gap, bound in zip(report.times, report.gap, report.bound):
            rows.append((theorem, float(t), float(gap), float(bound)))
    return rows


def verify_depth(eta=0.05, delta=10.0):
    """Bilinear simulation against the closed form, plus the depth gap."""
    profile = population_spectra(fig5_spec())
    init = dynamics.DeepInitSpec(L=2, delta=delta, d1=4)
    provider = PopulationSquaredDeep(profile, init)
    steps = int(np.sqrt(profile.ratios.max()) / eta) + 8  # past saturation
    record, _ = run(OptimizerConfig("specgd", eta), provider, steps=steps, stop_grad_norm=0.0)
    worst = 0.0
    for i, t in enumerate(record.times):
        ref0, ref1 = dynamics.bilinear_specgd(profile, init, eta, int(t))
        worst = max(worst, float(np.max(np.abs(record.layer_alpha[i] - np.stack([ref0, ref1])))))
    checks = [_upper_check("bilinear simulated vs closed form", worst, 1e-6)]
    sat = np.sqrt(profile.ratios)
    final_err = float(np.max(np.abs(record.layer_alpha[-1] - sat)))
    checks.append(_upper_check("bilinear saturation values sqrt(ratio)", final_err, 1e-6))
    gaps = [dynamics.saturation_gap(profile, L) for L in range(1, 7)]
    checks.append(_upper_check("depth gap L=1 vs 0.493827", abs(gaps[0] - 0.493827), 1e-6))
    # sqrt(1.493827) - 1; the rounded 6-digit value is 0.222222
    checks.append(_upper_check("depth gap L=2 vs 0.222222", abs(gaps[1] - 0.222222), 1e-6))
    decreasing = all(g1 > g2 for g1, g2 in zip(gaps, gaps[1:]))
    checks.append(Check("depth gap strictly decreasing L=1..6", float(decreasing), 1.0, decreasing))
    return checks


def verify_jointness(n=2000, seeds=(0, 1, 2, 3, 4)):
    """Finite-sample Condition-1 residual ratio lands around 0.013."""
    spec = fig2_spec()
    checks = []
    for seed in seeds:
        batch = sample(spec, n, seed)
        sxx, syx = empirical_moments(batch)
        ratio = jointness_residual(sxx, syx).ratio
        ok = 0.003 <= ratio <= 0.03
        checks.append(Check(f"jointness ratio (seed {seed}) in [0.003, 0.03]", ratio, 0.03, ok))
    return checks


def run_suite(suite):
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    table = {
        "reductions": verify_reductions,
        "dynamics": verify_dynamics,
        "theorems": verify_theorems,
        "depth": verify_depth,
        "jointness": verify_jointness,
    }
    names = [s for s in table] if suite == "all" else [suite]
    checks = []
    for name in names:
        checks.extend(table[name]())
    return checks
