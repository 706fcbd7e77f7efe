"""Run configuration: one JSON document with flat dotted key paths.

Nested objects are accepted and flattened, so ``{"run": {"n": 10}}`` and
``{"run.n": 10}`` are the same document. Recognised keys::

    schema_version            1
    model.a_law.p_1           P(a = a_1), strictly inside (0, 1)
    model.a_law.value_1/2     a labels (default 1.0, 2.0)
    model.c_values            [c_1, c_2] labels (default [1.0, 2.0])
    model.c_given_a1/a2       P(c = c_1 | a = a_r)
    model.cbar_given_a1       P(cbar = c_1 | a = a_1)
    model.chat_given_a2       P(chat = c_1 | a = a_2)
    model.cbar_given_a2, model.chat_given_a1   optional, never affect statistics
    run.n                     sample count (>= 1)
    run.seeds                 list of master seeds
    run.checkpoints           increasing N values in [1, n] (default powers of 10, then n)
    run.generator             "iid" | "pairwise_xor"
    run.fault_schedule        "none" | "squares"
    run.tilde_n               size of the auxiliary M_C-only ensemble (optional)
    run.min_check_n           no tolerance check below this N (default 1000)
    run.tolerance_sigma       width of the binomial bands in sigmas (default 4)
    run.tolerance_scale       extra multiplier on every band (default 1)
    run.tolerance.<stat>      absolute tolerance override per statistic
    run.min_passing_seeds     default ceil(0.95 * number of seeds)
    run.workers               seeds simulated concurrently (default 1)
    output.dir                default "out"
    output.format             "csv" | "json-lines"
    output.dump_samples       write per-seed measured-sample dumps (default false)
    sweep.parameter           model key to vary, e.g. "cbar_given_a1"
    sweep.values              explicit grid, or sweep.start / sweep.stop / sweep.step
    sweep.simulate_n          optional per-point simulation size
    sweep.seed                master seed for per-point simulations (default 0)
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .errors import ConfigError, InvalidModel
from .estimators import default_checkpoints
from .prob_core import ModelSpec, model_from_dict, validate

SCHEMA_VERSION = 1

GENERATORS = ("iid", "pairwise_xor")
FAULT_RULES = ("none", "squares")
FORMATS = ("csv", "json-lines")
STATISTICS = ("N1_frac", "q1", "m11_rate", "m12_rate", "gamma1_hat", "p1c_hat")


def flatten(doc: Mapping[str, Any], prefix: str = "") -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in doc.items():
        path = f"{prefix}{key}"
        if isinstance(value, Mapping):
            out.update(flatten(value, path + "."))
        else:
            out[path] = value
    return out


@dataclass
class SweepSpec:
    parameter: str
    values: list[float]
    simulate_n: int | None = None
    seed: int = 0


@dataclass
class RunConfig:
    model: ModelSpec
    n: int = 1000
    seeds: list[int] = field(default_factory=lambda: [0])
    checkpoints: list[int] = field(default_factory=list)
    generator: str = "iid"
    fault_schedule: str = "none"
    tilde_n: int | None = None
    min_check_n: int = 1000
    tolerance_sigma: float = 4.0
    tolerance_scale: float = 1.0
    tolerance: dict[str, float] = field(default_factory=dict)
    min_passing_seeds: int | None = None
    workers: int = 1
    out_dir: Path = Path("out")
    fmt: str = "csv"
    dump_samples: bool = False
    sweep: SweepSpec | None = None
    # raw flat model keys, kept so sweeps can vary one of them
    model_doc: dict[str, Any] = field(default_factory=dict)

    @property
    def required_passing(self) -> int:
        if self.min_passing_seeds is not None:
            return self.min_passing_seeds
        return math.ceil(0.95 * len(self.seeds))

    def resolved_checkpoints(self) -> list[int]:
        cps = list(self.checkpoints) or default_checkpoints(self.n)
        return cps if cps[-1] == self.n else cps + [self.n]


def _int(doc: Mapping[str, Any], key: str, default: Any, minimum: int | None = None) -> Any:
    value = doc.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ConfigError(f"{key} must be >= {minimum}, got {value}")
    return value


def _choice(doc: Mapping[str, Any], key: str, default: str, choices: tuple[str, ...]) -> str:
    value = doc.get(key, default)
    if value not in choices:
        raise ConfigError(f"{key} must be one of {choices}, got {value!r}")
    return value


def _model_doc(flat: Mapping[str, Any]) -> dict[str, Any]:
    return {k[len("model."):]: v for k, v in flat.items() if k.startswith("model.")}


def _sweep_values(flat: Mapping[str, Any]) -> list[float]:
    if "sweep.values" in flat:
        values = flat["sweep.values"]
        if not isinstance(values, list) or not values:
            raise ConfigError("sweep.values must be a non-empty list")
        return [float(v) for v in values]
    try:
        start, stop, step = (float(flat[k]) for k in ("sweep.start", "sweep.stop", "sweep.step"))
    except KeyError as exc:
        raise ConfigError(f"sweep needs sweep.values or start/stop/step (missing {exc.args[0]})") from None
    if step <= 0 or stop < start:
        raise ConfigError("sweep.step must be positive and sweep.stop >= sweep.start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def config_from_dict(doc: Mapping[str, Any], *, require_model: bool = True) -> RunConfig:
    flat = flatten(doc)
    version = flat.pop("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}")

    known_prefixes = ("model.", "run.", "output.", "sweep.")
    stray = [k for k in flat if not k.startswith(known_prefixes)]
    if stray:
        raise ConfigError(f"unknown config keys: {stray}")

    model_doc = _model_doc(flat)
    try:
        model = validate(model_from_dict(model_doc))
    except InvalidModel:
        # sweeps may start from a model that is only valid at some grid points
        if require_model:
            raise
        model = None

    n = _int(flat, "run.n", 1000, minimum=1)
    seeds = flat.get("run.seeds", [0])
    if not isinstance(seeds, list) or not seeds or not all(isinstance(s, int) and not isinstance(s, bool) for s in seeds):
        raise ConfigError("run.seeds must be a non-empty list of integers")
    checkpoints = flat.get("run.checkpoints", [])
    if not isinstance(checkpoints, list) or not all(isinstance(c, int) for c in checkpoints):
        raise ConfigError("run.checkpoints must be a list of integers")
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ConfigError("run.checkpoints must be strictly increasing")
    if checkpoints and (checkpoints[0] < 1 or checkpoints[-1] > n):
        raise ConfigError(f"run.checkpoints must lie in [1, {n}]")

    generator = _choice(flat, "run.generator", "iid", GENERATORS)
    if generator == "pairwise_xor" and model is not None:
        probs = [model.a_law.p_1] + [law.p_c1_given for law in model.conditionals().values()]
        if any(p != 0.5 for p in probs):
            raise ConfigError("run.generator = pairwise_xor requires every model probability to be 0.5")

    tolerance = {k[len("run.tolerance."):]: float(v) for k, v in flat.items() if k.startswith("run.tolerance.")}
    unknown_stats = set(tolerance) - set(STATISTICS)
    if unknown_stats:
        raise ConfigError(f"unknown tolerance statistics {sorted(unknown_stats)}; known: {STATISTICS}")

    sweep = None
    if any(k.startswith("sweep.") for k in flat):
        param = flat.get("sweep.parameter")
        if not isinstance(param, str):
            raise ConfigError("sweep.parameter is required")
        param = param[len("model."):] if param.startswith("model.") else param
        if param == "c_values" or param not in {
            "a_law.p_1", "a_law.value_1", "a_law.value_2", "c_given_a1", "c_given_a2",
            "cbar_given_a1", "cbar_given_a2", "chat_given_a1", "chat_given_a2",
        }:
            raise ConfigError(f"cannot sweep {param!r}")
        sweep = SweepSpec(
            parameter=param,
            values=_sweep_values(flat),
            simulate_n=_int(flat, "sweep.simulate_n", None, minimum=1),
            seed=_int(flat, "sweep.seed", 0),
        )

    try:
        tolerance_sigma = float(flat.get("run.tolerance_sigma", 4.0))
        tolerance_scale = float(flat.get("run.tolerance_scale", 1.0))
    except (TypeError, ValueError):
        raise ConfigError("run.tolerance_sigma and run.tolerance_scale must be numbers") from None

    return RunConfig(
        model=model,
        n=n,
        seeds=list(seeds),
        checkpoints=list(checkpoints),
        generator=generator,
        fault_schedule=_choice(flat, "run.fault_schedule", "none", FAULT_RULES),
        tilde_n=_int(flat, "run.tilde_n", None, minimum=1),
        min_check_n=_int(flat, "run.min_check_n", 1000, minimum=1),
        tolerance_sigma=tolerance_sigma,
        tolerance_scale=tolerance_scale,
        tolerance=tolerance,
        min_passing_seeds=_int(flat, "run.min_passing_seeds", None, minimum=0),
        workers=_int(flat, "run.workers", 1, minimum=1),
        out_dir=Path(flat.get("output.dir", "out")),
        fmt=_choice(flat, "output.format", "csv", FORMATS),
        dump_samples=bool(flat.get("output.dump_samples", False)),
        sweep=sweep,
        model_doc=model_doc,
    )


def load_config(path: str | Path, *, require_model: bool = True) -> RunConfig:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return config_from_dict(doc, require_model=require_model)
