"""Run configuration: a flat TOML file of dotted keys.

Example::

    body.inertia.principal = [1.0, 2.0, 3.0]
    initial.system = "n-omega"
    initial.n = [0.0, 0.0, 0.0]
    initial.momentum = [1.0, 1.0, 1.0]
    run.t_end = 20.0
    run.dt_out = 0.1

``initial.momentum`` holds pi, m or Omega according to ``initial.system``;
for ``euler-poisson`` give ``initial.R`` instead of ``initial.n``.
"""
from __future__ import annotations

import dataclasses
import json
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .dynamics import SYSTEMS, InertiaTensor, from_body_rate, STATE_TYPES
from .errors import RigidChartError
from .flows import LieSeriesConfig, StepControl


class ConfigError(RigidChartError):
    def __init__(self, message, key=None, line=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"field {key!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.key = key
        self.line = line


@dataclass
class Tolerances:
    chart: float = 1e-12
    chart_product: float = 1e-13
    roundtrip: float = 1e-9
    fd_order: float = 1.9
    pushforward: float = 1e-10
    antisymmetry: float = 1e-12
    jacobi: float = 1e-6
    involution: float = 1e-9
    nondegeneracy: float = 1e-12
    identity: float = 1e-13
    linear_term: float = 1e-8
    conservation: float = 1e-8
    energy_identity: float = 1e-10
    divergence: float = 1e-6
    oracle: float = 1e-7
    lie_order: float = 0.3


@dataclass
class RunConfig:
    principal: Optional[list] = field(default_factory=lambda: [1.0, 2.0, 3.0])
    orientation: Optional[list] = None
    matrix: Optional[list] = None
    initial_system: str = "n-omega"
    initial_n: Optional[list] = field(default_factory=lambda: [0.0, 0.0, 0.0])
    initial_R: Optional[list] = None
    initial_momentum: list = field(default_factory=lambda: [1.0, 1.0, 1.0])
    system: str = "n-omega"
    t_end: float = 20.0
    dt_out: float = 0.1
    rtol: float = 1e-10
    atol: float = 1e-10
    h0: float = 1e-2
    fixed_step: Optional[float] = None
    project: bool = False
    lie_order: int = 8
    lie_cap: float = 1.0
    reanchor_threshold: float = 9.0
    seed: int = 0
    samples: int = 100
    lane_omega: dict = field(default_factory=dict)
    tolerances: Tolerances = field(default_factory=Tolerances)

    # ---------------------------------------------------------- derived
    def inertia(self) -> InertiaTensor:
        if self.matrix is not None:
            return InertiaTensor(self.matrix)
        return InertiaTensor.from_principal(self.principal, self.orientation)

    def step_control(self) -> StepControl:
        return StepControl(rtol=self.rtol, atol=self.atol, h0=self.h0, fixed_step=self.fixed_step)

    def lie_config(self) -> LieSeriesConfig:
        return LieSeriesConfig(order=self.lie_order, cap=self.lie_cap)

    def initial_state(self):
        I = self.inertia()
        if self.initial_system == "euler-poisson":
            R = np.eye(3) if self.initial_R is None else np.asarray(self.initial_R, float)
            return from_body_rate(R, self.initial_momentum, "euler-poisson", I)
        cls = STATE_TYPES[self.initial_system]
        return cls(np.asarray(self.initial_n, float), np.asarray(self.initial_momentum, float))

    # ----------------------------------------------------- serialization
    def to_flat(self) -> dict:
        flat = {}
        for key, (attr, _) in _KEYS.items():
            value = getattr(self, attr)
            if value is not None:
                flat[key] = value
        for lane, w in sorted(self.lane_omega.items()):
            flat[f'compare.lane_omega."{lane}"'] = list(w)
        for f in dataclasses.fields(Tolerances):
            flat[f"tolerances.{f.name}"] = getattr(self.tolerances, f.name)
        return flat

    def dumps(self) -> str:
        return "".join(f"{k} = {json.dumps(v)}\n" for k, v in self.to_flat().items())


# dotted key -> (attribute, expected type)
_KEYS = {
    "body.inertia.principal": ("principal", "vec3"),
    "body.inertia.orientation": ("orientation", "mat3"),
    "body.inertia.matrix": ("matrix", "mat3"),
    "initial.system": ("initial_system", "system"),
    "initial.n": ("initial_n", "vec3"),
    "initial.R": ("initial_R", "mat3"),
    "initial.momentum": ("initial_momentum", "vec3"),
    "run.system": ("system", "system"),
    "run.t_end": ("t_end", "float"),
    "run.dt_out": ("dt_out", "positive"),
    "integrator.rtol": ("rtol", "positive"),
    "integrator.atol": ("atol", "positive"),
    "integrator.h0": ("h0", "positive"),
    "integrator.fixed_step": ("fixed_step", "positive"),
    "integrator.project": ("project", "bool"),
    "lie.order": ("lie_order", "int"),
    "lie.cap": ("lie_cap", "positive"),
    "chart.reanchor_threshold": ("reanchor_threshold", "positive"),
    "verify.seed": ("seed", "int"),
    "verify.samples": ("samples", "int"),
}


def _flatten(tree, prefix=""):
    out = {}
    for k, v in tree.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _line_of(text, key):
    last = key.split(".")[-1]
    pattern = re.compile(r'(^|[.\s"])' + re.escape(last) + r'"?\s*=')
    for i, line in enumerate(text.splitlines(), 1):
        if pattern.search(line):
            return i
    return None


def _coerce(value, kind, key, line):
    def fail(msg):
        raise ConfigError(msg, key, line)

    try:
        if kind == "vec3":
            arr = np.asarray(value, dtype=float)
            if arr.shape != (3,) or not np.all(np.isfinite(arr)):
                fail("expected a list of 3 finite numbers")
            return [float(x) for x in arr]
        if kind == "mat3":
            arr = np.asarray(value, dtype=float)
            if arr.shape != (3, 3) or not np.all(np.isfinite(arr)):
                fail("expected a 3x3 nested list of finite numbers")
            return [[float(x) for x in row] for row in arr]
    except (TypeError, ValueError):
        fail("expected numeric values")
    if kind == "system":
        if value not in SYSTEMS:
            fail(f"unknown coordinate system {value!r}; expected one of {SYSTEMS}")
        return value
    if kind == "bool":
        if not isinstance(value, bool):
            fail("expected true or false")
        return value
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            fail("expected an integer")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        fail("expected a number")
    value = float(value)
    if kind == "positive" and not value > 0.0:
        fail("must be positive")
    return value


def loads(text: str) -> RunConfig:
    try:
        tree = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(str(exc)) from exc
    flat = _flatten(tree)
    cfg = RunConfig()
    tol = {}
    has_matrix = has_principal = False
    for key, value in flat.items():
        line = _line_of(text, key)
        if key in _KEYS:
            attr, kind = _KEYS[key]
            setattr(cfg, attr, _coerce(value, kind, key, line))
            has_matrix |= attr == "matrix"
            has_principal |= attr == "principal"
        elif key.startswith("compare.lane_omega."):
            lane = key[len("compare.lane_omega."):]
            if lane not in SYSTEMS:
                raise ConfigError(f"unknown lane {lane!r}", key, line)
            cfg.lane_omega[lane] = _coerce(value, "vec3", key, line)
        elif key.startswith("tolerances."):
            name = key[len("tolerances."):]
            if name not in {f.name for f in dataclasses.fields(Tolerances)}:
                raise ConfigError("unknown tolerance", key, line)
            tol[name] = _coerce(value, "positive", key, line)
        else:
            raise ConfigError("unknown key", key, line)
    if has_matrix and has_principal:
        raise ConfigError("give either body.inertia.matrix or body.inertia.principal, not both",
                          "body.inertia.matrix", _line_of(text, "body.inertia.matrix"))
    if has_matrix:
        cfg.principal = None
    cfg.tolerances = Tolerances(**tol)
    if cfg.lie_order < 1:
        raise ConfigError("must be at least 1", "lie.order", _line_of(text, "lie.order"))
    if cfg.samples < 1:
        raise ConfigError("must be at least 1", "verify.samples", _line_of(text, "verify.samples"))
    try:
        cfg.inertia()
    except RigidChartError as exc:
        key = "body.inertia.matrix" if has_matrix else "body.inertia.principal"
        raise ConfigError(str(exc), key, _line_of(text, key)) from exc
    return cfg


def load(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
