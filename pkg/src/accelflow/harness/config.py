"""Experiment configuration: one JSON document, validated against the catalogs.

A config is a single flat JSON object; command-line flags override its
top-level fields. Problems and mirror maps are referenced by their catalog
identifiers so configs stay diffable and machine-checkable. Method parameter
constraints (admissible C, N > 1, epsilon > 0, ...) are owned by the method
constructors themselves — validation here checks identifiers, field names,
and shapes, then lets the modules reject bad numbers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..core import builtin_mirror_maps, builtin_problems
from ..errors import InputError
from .reporting import EXPERIMENT_KINDS

# top-level fields a config document may carry
CONFIG_FIELDS = (
    "kind",
    "problem",
    "x0",
    "method",
    "integration",
    "window",
    "out",
    "seed",
    "scale",
)

# method-dict keys admitted per experiment kind; anything else is a typo
METHOD_KEYS = {
    "flow": {"family", "p", "C", "c", "m", "mirror"},
    "optimize": {"algorithm", "p", "epsilon", "N", "C", "K", "mirror", "c", "delta"},
    "compare": {"p", "delta", "N", "C", "factor"},
    "dilation_check": {"p", "C"},
    "restart": {"epsilon", "epochs"},
    "naive_demo": {"p", "C", "epsilon", "K", "accel_K", "accel_N"},
    "acceptance": set(),
}

FLOW_FAMILIES = ("polynomial", "exponential", "rescaled", "massless")
OPTIMIZE_ALGORITHMS = ("accelerated", "descent", "exponential")

_INTEGRATION_KEYS = {
    "t0", "t_end", "method", "steps", "record_every",
    "rel_tol", "abs_tol", "initial_step", "max_steps",
}


@dataclass
class ExperimentConfig:
    """One experiment: what to run, on which problem, where to put files."""

    kind: str
    problem: str = "quadratic"
    x0: list | None = None
    method: dict = field(default_factory=dict)
    integration: dict = field(default_factory=dict)
    window: list | None = None
    out: str | None = None
    seed: int = 0
    scale: str = "quick"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.kind not in EXPERIMENT_KINDS:
            raise InputError(
                f"unknown experiment kind {self.kind!r}; choose from {EXPERIMENT_KINDS}"
            )
        problems = builtin_problems()
        if self.problem not in problems:
            raise InputError(
                f"unknown problem id {self.problem!r}; "
                f"catalog has {sorted(problems)}"
            )
        if not isinstance(self.method, dict):
            raise InputError("method must be an object of method parameters")
        extra = set(self.method) - METHOD_KEYS[self.kind]
        if extra:
            raise InputError(
                f"method keys {sorted(extra)} are not used by kind={self.kind}; "
                f"admitted keys: {sorted(METHOD_KEYS[self.kind])}"
            )
        mirror = self.method.get("mirror")
        if mirror is not None and mirror not in builtin_mirror_maps():
            raise InputError(
                f"unknown mirror id {mirror!r}; "
                f"catalog has {sorted(builtin_mirror_maps())}"
            )
        if self.kind == "flow":
            family = self.method.get("family", "polynomial")
            if family not in FLOW_FAMILIES:
                raise InputError(
                    f"flow family must be one of {FLOW_FAMILIES}, got {family!r}"
                )
        if self.kind == "optimize":
            algorithm = self.method.get("algorithm", "accelerated")
            if algorithm not in OPTIMIZE_ALGORITHMS:
                raise InputError(
                    f"optimize algorithm must be one of {OPTIMIZE_ALGORITHMS}, "
                    f"got {algorithm!r}"
                )
        if not isinstance(self.integration, dict):
            raise InputError("integration must be an object of integrator controls")
        unknown = set(self.integration) - _INTEGRATION_KEYS
        if unknown:
            raise InputError(
                f"unknown integration controls {sorted(unknown)}; "
                f"admitted: {sorted(_INTEGRATION_KEYS)}"
            )
        if self.x0 is not None:
            arr = np.asarray(self.x0, dtype=np.float64)
            if arr.ndim != 1 or arr.size == 0 or not np.all(np.isfinite(arr)):
                raise InputError("x0 must be a non-empty list of finite numbers")
        if self.window is not None:
            if (
                not isinstance(self.window, (list, tuple))
                or len(self.window) != 2
                or not self.window[0] < self.window[1]
            ):
                raise InputError(f"window must be [lo, hi] with lo < hi, got {self.window!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise InputError(f"seed must be a nonnegative integer, got {self.seed!r}")
        if self.scale not in ("quick", "full"):
            raise InputError(f"scale must be 'quick' or 'full', got {self.scale!r}")

    def problem_oracle(self):
        return builtin_problems()[self.problem]

    def mirror_map(self):
        """The configured mirror map instance, or None when unset."""
        mirror = self.method.get("mirror")
        return None if mirror is None else builtin_mirror_maps()[mirror]

    def resolved_x0(self) -> np.ndarray:
        """Explicit x0, or all-ones in the problem's dimension."""
        if self.x0 is not None:
            return np.asarray(self.x0, dtype=np.float64)
        f = self.problem_oracle()
        if f.dimension is None:
            raise InputError(
                f"{self.problem} has no fixed dimension; the config must give x0"
            )
        return np.ones(f.dimension)

    def to_doc(self) -> dict:
        return {
            "kind": self.kind,
            "problem": self.problem,
            "x0": None if self.x0 is None else [float(v) for v in self.x0],
            "method": dict(self.method),
            "integration": dict(self.integration),
            "window": None if self.window is None else list(self.window),
            "out": self.out,
            "seed": int(self.seed),
            "scale": self.scale,
        }


def load_config(path) -> dict:
    """Read a JSON config document; IO and parse problems become InputError."""
    try:
        with open(path, encoding="utf-8") as src:
            doc = json.load(src)
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"config {path} must hold a JSON object at top level")
    return doc


def config_from(doc: dict, **overrides) -> ExperimentConfig:
    """Build a validated ExperimentConfig from a document plus CLI overrides.

    Overrides with value None mean "not given on the command line" and leave
    the document's value alone; anything else replaces the top-level field.
    """
    merged = dict(doc)
    unknown = set(merged) - set(CONFIG_FIELDS)
    if unknown:
        raise InputError(
            f"unknown config fields {sorted(unknown)}; "
            f"admitted: {sorted(CONFIG_FIELDS)}"
        )
    for key, value in overrides.items():
        if key not in CONFIG_FIELDS:
            raise InputError(f"unknown override field {key!r}")
        if value is not None:
            if key == "kind" and "kind" in merged and merged["kind"] != value:
                raise InputError(
                    f"config says kind={merged['kind']!r} but the command line "
                    f"asks for {value!r}; drop one of them"
                )
            merged[key] = value
    if "kind" not in merged:
        raise InputError("experiment kind is required (config field or subcommand)")
    return ExperimentConfig(**merged)
