"""Deterministic experiment execution and CSV emission.

Runs are independent (optimizer, seed) pairs executed on a bounded thread
pool (capped by SPECLAB_THREADS); every run derives its RNG stream from a
hash of its own identity, so scheduling order cannot perturb results. A
single collector thread writes the CSV files, sorted by run identity, so
identical inputs give byte-identical outputs.
"""

import hashlib
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import dynamics
from .data import population_spectra, sample
from .metrics import accuracy_metrics, population_class_loss
from .optimizers import (
    EmpiricalCrossEntropy,
    EmpiricalSquared,
    OptimizerState,
    PopulationSquaredDeep,
    PopulationSquaredLinear,
    run as run_optimizer,
)

TRAJECTORY_COLUMNS = (
    "run_id",
    "algo",
    "step_or_time",
    "component",
    "alpha",
    "layer",
    "offdiag_residual",
    "grad_norm",
)
LOSS_COLUMNS = (
    "run_id",
    "algo",
    "step_or_time",
    "class_user_index",
    "class_spectral_index",
    "loss",
    "accuracy",
)

VERSION = "0.1.0"


def worker_count():
    env = os.environ.get("SPECLAB_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def run_seed(config, seed, label):
    """Derived RNG seed: depends only on the run's own identity."""
    digest = hashlib.sha256(f"{config.name}:{label}:{seed}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class RunManifest:
    run_id: str
    config: dict
    tool_version: str
    wall_time_s: float


def _fmt(x):
    if x is None or x == "":
        return ""
    return repr(float(x))


def _write_csv(path, columns, rows):
    with open(path, "w") as f:
        f.write(",".join(columns) + "\n")
        for row in rows:
            f.write(",".join(str(v) for v in row) + "\n")


def _build_provider(config, seed):
    profile = population_spectra(config.data)
    if config.provider == "population":
        if config.model == "linear":
            return PopulationSquaredLinear(profile), profile, None
        return PopulationSquaredDeep(profile, config.deep), profile, None
    batch = sample(config.data, config.n, seed)
    if config.loss == "ce":
        return EmpiricalCrossEntropy(batch), profile, batch
    return EmpiricalSquared(batch), profile, batch


def _execute_run(config, opt, label, seed):
    t0 = time.monotonic()
    provider, profile, batch = _build_provider(config, seed)
    if not hasattr(provider, "init_state"):
        rng = np.random.Generator(np.random.Philox(run_seed(config, seed, label)))
        W0 = rng.standard_normal((config.data.k, config.data.d)) / np.sqrt(config.data.d)
        init = OptimizerState.from_matrix(W0)
    else:
        init = None
    record, state = run_optimizer(
        opt,
        provider,
        init=init,
        steps=config.steps,
        stop_grad_norm=config.stop_grad_norm,
        record_every=config.record_every,
    )
    run_id = f"{config.name}-{label}-s{seed}"
    traj_rows, loss_rows = [], []
    for i, t in enumerate(record.times):
        t_out = int(t)
        gnorm = _fmt(record.grad_norm[i])
        if record.alpha is None:
            traj_rows.append((run_id, opt.rule, t_out, "", "", "", "", gnorm))
        elif record.layer_alpha is not None:
            off = _fmt(record.offdiag_residual[i])
            for layer in range(record.layer_alpha.shape[1]):
                for c in range(record.layer_alpha.shape[2]):
                    traj_rows.append(
                        (run_id, opt.rule, t_out, c,
                         _fmt(record.layer_alpha[i, layer, c]), layer, off, gnorm)
                    )
        else:
            off = _fmt(record.offdiag_residual[i])
            for c in range(record.alpha.shape[1]):
                traj_rows.append(
                    (run_id, opt.rule, t_out, c, _fmt(record.alpha[i, c]), "", off, gnorm)
                )
        if record.alpha is not None and config.provider == "population":
            losses = population_class_loss(profile, record.alpha[i])
            for c in range(profile.k):
                loss_rows.append(
                    (run_id, opt.rule, t_out, int(profile.perm[c]), c,
                     _fmt(losses.per_class[c]), "")
                )
    if batch is not None:
        acc = accuracy_metrics(state.Ws[0], batch)
        ce = _per_class_ce(state.Ws[0], batch) if config.loss == "ce" else None
        for c in range(batch.k):
            loss_rows.append(
                (run_id, opt.rule, int(record.times[-1]), c, "",
                 _fmt(ce[c]) if ce is not None and np.isfinite(ce[c]) else "",
                 _fmt(acc.per_class[c]) if np.isfinite(acc.per_class[c]) else "")
            )
    manifest = RunManifest(
        run_id=run_id,
        config={
            "name": config.name,
            "optimizer": asdict(opt),
            "seed": seed,
            "model": config.model,
            "provider": config.provider,
            "steps": config.steps,
        },
        tool_version=VERSION,
        wall_time_s=time.monotonic() - t0,
    )
    return run_id, traj_rows, loss_rows, manifest


def _per_class_ce(W, batch):
    Z = batch.X @ W.T
    Z = Z - Z.max(axis=1, keepdims=True)
    logp = Z - np.log(np.exp(Z).sum(axis=1, keepdims=True))
    out = np.full(batch.k, np.nan)
    for c in range(batch.k):
        mask = batch.labels == c
        if mask.any():
            out[c] = float(-logp[mask, c].mean())
    return out


def simulate(config, out_dir):
    """Run every (optimizer, seed) pair; write trajectory/losses/manifests."""
    os.makedirs(out_dir, exist_ok=True)
    jobs = [
        (opt, label, seed)
        for opt, label in zip(config.optimizers, config.optimizer_labels)
        for seed in config.seeds
    ]
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        results = list(
            pool.map(lambda j: _execute_run(config, j[0], j[1], j[2]), jobs)
        )
    results.sort(key=lambda r: r[0])
    traj, losses, manifests = [], [], []
    for _, t_rows, l_rows, manifest in results:
        traj.extend(t_rows)
        losses.extend(l_rows)
        manifests.append(manifest)
    _write_csv(os.path.join(out_dir, "trajectory.csv"), TRAJECTORY_COLUMNS, traj)
    _write_csv(os.path.join(out_dir, "losses.csv"), LOSS_COLUMNS, losses)
    for m in manifests:
        with open(os.path.join(out_dir, f"{m.run_id}.manifest.json"), "w") as f:
            json.dump(asdict(m), f, indent=2, sort_keys=True)
    return manifests


CLOSED_FORM_ALGOS = ("gd", "gf", "specgd", "specgf", "ngf", "bilinear", "deep")


def closed_form(config, algos, t_grid, out_dir):
    """Emit analytic trajectories for the requested algorithms."""
    os.makedirs(out_dir, exist_ok=True)
    profile = population_spectra(config.data)
    eta = {label: opt.eta for opt, label in zip(config.optimizers, config.optimizer_labels)}
    default_eta = config.optimizers[0].eta if config.optimizers else 0.01
    rows = []
    for algo in algos:
        if algo not in CLOSED_FORM_ALGOS:
            raise ValueError(f"no closed form for {algo!r}")
        run_id = f"{config.name}-{algo}-analytic"
        if algo == "ngf":
            rec = dynamics.ngf_integrate(profile, t_grid)
            alphas = rec.alpha
        else:
            alphas = []
            for t in t_grid:
                e = eta.get(algo, default_eta)
                if algo == "gd":
                    a = dynamics.gd_discrete(profile, e, t)
                elif algo == "gf":
                    a = dynamics.gf(profile, t)
                elif algo == "specgd":
                    a = dynamics.specgd_discrete(profile, e, t)
                elif algo == "specgf":
                    a = dynamics.specgf(profile, t)
                elif algo == "bilinear":
                    a = dynamics.bilinear_specgd(profile, config.deep, e, t)[0]
                else:
                    a = dynamics.deep_specgd(profile, config.deep, e, t)[0]
                alphas.append(a)
            alphas = np.asarray(alphas)
        for i, t in enumerate(t_grid):
            for c in range(profile.k):
                rows.append(
                    (run_id, algo, _fmt(t), c, _fmt(alphas[i, c]), "", _fmt(0.0), "")
                )
    _write_csv(os.path.join(out_dir, "trajectory.csv"), TRAJECTORY_COLUMNS, rows)
    return len(rows)


def spectra_table(config):
    """Rows (component, s_yx, s_xx, ratio, t_star) plus profile summary."""
    profile = population_spectra(config.data)
    rows = []
    for c in range(profile.k):
        rows.append(
            {
                "component": c,
                "user_class": int(profile.perm[c]),
                "s_yx": profile.s_yx[c],
                "s_xx": profile.s_xx[c],
                "ratio": profile.ratios[c],
            }
        )
    return profile, rows


def report(losses_path):
    """Aggregate a losses.csv into balanced / worst rows per (run, time)."""
    groups = {}
    with open(losses_path) as f:
        header = f.readline().strip().split(",")
        idx = {name: i for i, name in enumerate(header)}
        for line in f:
            parts = line.rstrip("\n").split(",")
            key = (parts[idx["run_id"]], parts[idx["step_or_time"]])
            val = parts[idx["loss"]]
            if val:
                groups.setdefault(key, []).append(float(val))
    out = []
    for (run_id, t), vals in sorted(groups.items(), key=lambda kv: (kv[0][0], float(kv[0][1]))):
        out.append(
            {
                "run_id": run_id,
                "step_or_time": t,
                "balanced_loss": sum(vals) / len(vals),
                "worst_loss": max(vals),
            }
        )
    return out
