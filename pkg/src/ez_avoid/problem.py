"""Scenario definitions shared by the transcription and the scenario solvers."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateBoundary, NonpositiveSpeed, OriginSingularity
from .geometry import EPS_D, EngagementZone, VehicleState

log = logging.getLogger(__name__)

KINDS = ("A", "B", "C", "D")

# default instance used throughout the demos and acceptance tests
DEFAULT_X0 = VehicleState(1.0, 3.0)
DEFAULT_XF = VehicleState(-0.5, -3.0)
DEFAULT_V = 1.0
DEFAULT_R_MAX = 2.0
DEFAULT_GRID_M = 19


@dataclass(frozen=True)
class ScenarioSpec:
    """One of the four problem variants.

    ``k_ez`` is only used by C and ``t_go`` only by D.  Validation rejects
    degenerate geometry; a start or goal within ``r_max`` of the zone origin
    only produces a warning for B, because feasibility there depends on
    heading.
    """

    kind: str
    x0: VehicleState = DEFAULT_X0
    xf: VehicleState = DEFAULT_XF
    v: float = DEFAULT_V
    ez: EngagementZone = field(default_factory=lambda: EngagementZone(DEFAULT_R_MAX))
    k_ez: float = 0.0
    t_go: Optional[float] = None
    grid_m: int = DEFAULT_GRID_M

    def __post_init__(self):
        object.__setattr__(self, "kind", str(self.kind).upper())
        object.__setattr__(self, "x0", VehicleState(float(self.x0[0]), float(self.x0[1])))
        object.__setattr__(self, "xf", VehicleState(float(self.xf[0]), float(self.xf[1])))
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.v > 0:
            raise NonpositiveSpeed(f"speed must be positive, got {self.v!r}")
        if self.x0 == self.xf:
            raise DegenerateBoundary("start and goal coincide")
        for name, p in (("x0", self.x0), ("xf", self.xf)):
            d = float(np.hypot(*p))
            if d <= EPS_D:
                raise OriginSingularity(f"{name} sits on the EZ origin")
            if self.kind == "B" and d <= self.ez.r_max:
                log.warning("%s at range %.4g <= r_max=%.4g; some headings there are infeasible",
                            name, d, self.ez.r_max)
        if self.k_ez < 0:
            raise ValueError("k_ez must be non-negative")
        if self.kind == "D":
            if self.t_go is None or not self.t_go > 0:
                raise ValueError("scenario D needs a positive t_go")
        if int(self.grid_m) < 2:
            raise ValueError("grid_m must be at least 2")
        object.__setattr__(self, "grid_m", int(self.grid_m))

    @property
    def free_final_time(self) -> bool:
        return self.kind != "D"

    def replace(self, **changes) -> "ScenarioSpec":
        from dataclasses import replace
        return replace(self, **changes)
