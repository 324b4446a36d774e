"""Experiment configuration: flat INI files with typed sections.

Layout:

    [experiment]
    name = fig2
    model = linear            ; linear | bilinear | deep
    provider = population     ; population | finite
    loss = sq                 ; sq | ce (finite provider only)
    n = 100                   ; finite sample size
    steps = 200
    record_every = 1
    stop_grad_norm = 1e-6
    seeds = 0,1,2

    [data]
    k = 3
    d = 3
    mu = 1.0
    sigma2 = 0.125
    priors = 0.5,0.3,0.2      ; or scheme = zipf / step with ratio, majority_count
    mean_seed = 0
    mean_mode = exact_orthonormal

    [optimizer.gd]            ; one section per optimizer; suffix is a label
    rule = gd
    eta = 0.01

    [deep]                    ; only for bilinear/deep models
    L = 2
    delta = 10
    d1 = 4
    q_seed = 0
"""

import configparser
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .data import DataModelSpec, make_priors
from .dynamics import DeepInitSpec
from .errors import ConfigError
from .optimizers import OptimizerConfig


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    data: DataModelSpec
    optimizers: List[OptimizerConfig]
    optimizer_labels: List[str]
    model: str = "linear"
    provider: str = "population"
    loss: str = "sq"
    n: int = 100
    steps: int = 100
    record_every: int = 1
    stop_grad_norm: float = 1e-6
    seeds: List[int] = field(default_factory=lambda: [0])
    deep: Optional[DeepInitSpec] = None


def _get(section, key, cast, default=None, where=""):
    if key not in section:
        if default is not None:
            return default
        raise ConfigError(f"missing key {key!r} in section [{where}]")
    raw = section[key]
    try:
        return cast(raw)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad value {raw!r} for {where}.{key}: {e}") from e


def _float_list(raw):
    return [float(x) for x in raw.replace(";", ",").split(",") if x.strip()]


def _int_list(raw):
    return [int(x) for x in raw.replace(";", ",").split(",") if x.strip()]


def _parse_data(section):
    k = _get(section, "k", int, where="data")
    if "priors" in section:
        priors = np.asarray(_float_list(section["priors"]))
        if priors.size != k:
            raise ConfigError(f"priors has {priors.size} entries for k = {k}")
        if abs(priors.sum() - 1.0) > 1e-12 or np.any(priors <= 0):
            raise ConfigError(
                f"priors must be positive and sum to 1 (sum = {priors.sum()!r})"
            )
    else:
        scheme = _get(section, "scheme", str, where="data")
        try:
            priors = make_priors(
                scheme,
                k=k,
                ratio=_get(section, "ratio", float, 1.0, "data"),
                majority_count=_get(section, "majority_count", int, 1, "data"),
            )
        except Exception as e:
            raise ConfigError(f"bad prior scheme: {e}") from e
    try:
        return DataModelSpec(
            k=k,
            d=_get(section, "d", int, where="data"),
            mu=_get(section, "mu", float, 1.0, "data"),
            sigma2=_get(section, "sigma2", float, where="data"),
            priors=priors,
            mean_seed=_get(section, "mean_seed", int, 0, "data"),
            mean_mode=section.get("mean_mode", "exact_orthonormal"),
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e


def _parse_optimizer(label, section):
    kwargs = {"rule": _get(section, "rule", str, where=label)}
    kwargs["eta"] = _get(section, "eta", float, where=label)
    for key in ("beta", "beta1", "beta2", "epsilon", "shampoo_epsilon"):
        if key in section:
            kwargs[key] = _get(section, key, float, where=label)
    if "polar_method" in section:
        kwargs["polar_method"] = section["polar_method"]
    if "polar_iterations" in section:
        kwargs["polar_iterations"] = _get(section, "polar_iterations", int, where=label)
    try:
        return OptimizerConfig(**kwargs)
    except ValueError as e:
        raise ConfigError(f"[{label}] {e}") from e


def load_config(path):
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        read = parser.read(path)
    except configparser.Error as e:
        raise ConfigError(f"cannot parse {path}: {e}") from e
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    if "experiment" not in parser or "data" not in parser:
        raise ConfigError("config needs [experiment] and [data] sections")
    exp = parser["experiment"]
    data = _parse_data(parser["data"])
    labels, opts = [], []
    for name in parser.sections():
        if name.startswith("optimizer"):
            label = name.split(".", 1)[1] if "." in name else name
            labels.append(label)
            opts.append(_parse_optimizer(name, parser[name]))
    model = exp.get("model", "linear")
    if model not in ("linear", "bilinear", "deep"):
        raise ConfigError(f"unknown model {model!r}")
    deep = None
    if model in ("bilinear", "deep"):
        if "deep" not in parser:
            raise ConfigError(f"model {model!r} needs a [deep] section")
        ds = parser["deep"]
        try:
            deep = DeepInitSpec(
                L=_get(ds, "L", int, 2 if model == "bilinear" else None, "deep"),
                delta=_get(ds, "delta", float, where="deep"),
                d1=_get(ds, "d1", int, 0, "deep"),
                q_seed=_get(ds, "q_seed", int, 0, "deep"),
            )
        except ValueError as e:
            raise ConfigError(f"[deep] {e}") from e
    provider = exp.get("provider", "population")
    if provider not in ("population", "finite"):
        raise ConfigError(f"unknown provider {provider!r}")
    loss = exp.get("loss", "sq")
    if loss not in ("sq", "ce"):
        raise ConfigError(f"unknown loss {loss!r}")
    record_every = _get(exp, "record_every", int, 1 if provider == "population" else 10, "experiment")
    if record_every < 1:
        raise ConfigError("record_every must be >= 1")
    seeds = _int_list(exp.get("seeds", "0"))
    if not seeds:
        raise ConfigError("seeds must be nonempty")
    return ExperimentConfig(
        name=exp.get("name", "experiment"),
        data=data,
        optimizers=opts,
        optimizer_labels=labels,
        model=model,
        provider=provider,
        loss=loss,
        n=_get(exp, "n", int, 100, "experiment"),
        steps=_get(exp, "steps", int, 100, "experiment"),
        record_every=record_every,
        stop_grad_norm=_get(exp, "stop_grad_norm", float, 1e-6, "experiment"),
        seeds=seeds,
        deep=deep,
    )
