"""Run configuration, read from one JSON document.

Every key is optional; omitted keys take the default instance (start
``(1, 3)``, goal ``(-0.5, -3)``, unit speed, zone radius 2).  Unknown keys
are rejected.

=============  ==================================  =========================
key            meaning                             default
=============  ==================================  =========================
scenario       A, B, C, D, sweep-C or all          ``"all"``
x0, xf         start and goal ``[x, y]``           ``[1, 3]``, ``[-0.5, -3]``
v              speed                               1
r_max          zone radius                         2
grid_m         collocation nodes                   19
k_ez           penalty gain for a single C run     1
k_sweep        gains for sweep-C                   ``[0.1, 1, 10, 100]``
t_go           arrival time for D                  6.25
rho_begin      initial trust radius                0.5
rho_end        final trust radius                  1e-6
max_evals      evaluation budget per solve         20000
tol_c          constraint tolerance                1e-8
restarts       solves per starting point           1
jitter         restart perturbation half-width     0.05
seed           restart RNG seed                    0
output_dir     where files go                      ``"ez_avoid_out"``
formats        any of csv, json, svg               ``["csv", "json", "svg"]``
=============  ==================================  =========================
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError
from .geometry import EngagementZone
from .problem import DEFAULT_GRID_M, DEFAULT_R_MAX, DEFAULT_V, DEFAULT_X0, DEFAULT_XF, ScenarioSpec
from .scenarios import SolverSettings

SCENARIOS = ("A", "B", "C", "D", "sweep-C", "all")
FORMATS = ("csv", "json", "svg")


@dataclass(frozen=True)
class RunConfig:
    scenario: str = "all"
    x0: tuple = tuple(DEFAULT_X0)
    xf: tuple = tuple(DEFAULT_XF)
    v: float = DEFAULT_V
    r_max: float = DEFAULT_R_MAX
    grid_m: int = DEFAULT_GRID_M
    k_ez: float = 1.0
    k_sweep: tuple = (0.1, 1.0, 10.0, 100.0)
    t_go: float = 6.25
    rho_begin: float = 0.5
    rho_end: float = 1e-6
    max_evals: int = 20000
    tol_c: float = 1e-8
    restarts: int = 1
    jitter: float = 0.05
    seed: int = 0
    output_dir: str = "ez_avoid_out"
    formats: tuple = FORMATS

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        for name in ("x0", "xf"):
            val = getattr(self, name)
            if len(val) != 2:
                raise ConfigError(f"{name} needs two coordinates")
            object.__setattr__(self, name, tuple(float(c) for c in val))
        object.__setattr__(self, "k_sweep", tuple(float(k) for k in self.k_sweep))
        bad = [f for f in self.formats if f not in FORMATS]
        if bad or not self.formats:
            raise ConfigError(f"formats must be a non-empty subset of {FORMATS}, got {list(self.formats)}")
        object.__setattr__(self, "formats", tuple(f for f in FORMATS if f in self.formats))
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not 0 < self.rho_end < self.rho_begin:
            raise ConfigError("need 0 < rho_end < rho_begin")
        if self.restarts < 1 or self.max_evals < 1:
            raise ConfigError("restarts and max_evals must be positive")
        try:
            for kind in ("A", "C", "D"):
                self.spec(kind)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        try:
            return cls(**doc)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("x0", "xf", "k_sweep", "formats"):
            d[k] = list(d[k])
        return d

    def override(self, **changes) -> "RunConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def spec(self, kind: str, **extra) -> ScenarioSpec:
        args = dict(kind=kind, x0=self.x0, xf=self.xf, v=self.v, ez=EngagementZone(self.r_max),
                    grid_m=self.grid_m)
        if kind == "C":
            args["k_ez"] = self.k_ez
        if kind == "D":
            args["t_go"] = self.t_go
        args.update(extra)
        return ScenarioSpec(**args)

    @property
    def settings(self) -> SolverSettings:
        return SolverSettings(self.rho_begin, self.rho_end, self.max_evals, self.tol_c,
                              self.restarts, self.jitter, self.seed)
