"""Engagement-zone geometry.

The engagement zone (EZ) is a cardioid centred on the origin whose reach
depends on where the vehicle is pointing relative to the line of sight.
Everything here is a pure function of its arguments and broadcasts over
numpy arrays; a *state* is anything whose last axis holds ``(x, y)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import OriginSingularity

EPS_D = 1e-9
"""States closer than this to the EZ origin are rejected."""

TWO_PI = 2.0 * np.pi


class VehicleState(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class EngagementZone:
    """Cardioid keep-out zone parameters.

    Only ``r_min == 0`` and an origin at ``(0, 0)`` are supported; an offset
    origin is handled by translating the problem before building states.
    """

    r_max: float
    r_min: float = 0.0
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not np.isfinite(self.r_max) or self.r_max <= 0:
            raise ValueError(f"r_max must be positive, got {self.r_max!r}")
        if self.r_min != 0.0:
            raise ValueError("only r_min = 0 is supported")
        if tuple(self.origin) != (0.0, 0.0):
            raise ValueError("EZ origin must be (0, 0); translate the problem frame instead")


def wrap_angle(a):
    """Wrap angles to ``(-pi, pi]``. Values already in range pass through unchanged."""
    a = np.asarray(a, dtype=float)
    inside = (a > -np.pi) & (a <= np.pi)
    r = np.pi - np.remainder(np.pi - a, TWO_PI)
    r = np.where(r <= -np.pi, r + TWO_PI, r)
    out = np.where(inside, a, r)
    return out[()] if out.ndim == 0 else out


def _xy(state):
    s = np.asarray(state, dtype=float)
    if s.shape[-1] != 2:
        raise ValueError(f"state must have a trailing axis of length 2, got shape {s.shape}")
    return s[..., 0], s[..., 1]


def distance(state):
    """Range from the EZ origin."""
    x, y = _xy(state)
    out = np.hypot(x, y)
    return out[()] if np.ndim(out) == 0 else out


def _guard(d):
    if np.any(np.asarray(d) <= EPS_D):
        raise OriginSingularity(f"state within {EPS_D:g} DU of the EZ origin")


def los_angle(state):
    """Four-quadrant line-of-sight angle from the EZ origin to the vehicle."""
    x, y = _xy(state)
    _guard(np.hypot(x, y))
    return wrap_angle(np.arctan2(y, x))


def aspect_angle(state, psi):
    """Aspect angle ``xi = psi - lambda - pi``, wrapped; zero when heading at the origin."""
    return wrap_angle(np.asarray(psi, dtype=float) - los_angle(state) - np.pi)


def rho_max(xi, ez: EngagementZone):
    """Maximum EZ range for aspect angle ``xi``."""
    out = 0.5 * ez.r_max * (np.cos(xi) + 1.0)
    return out[()] if np.ndim(out) == 0 else out


def rho_general(theta, lam, xi, ez: EngagementZone):
    """EZ range in direction ``theta`` for line of sight ``lam`` and aspect ``xi``.

    With ``theta == lam`` this is :func:`rho_max`, the worst-case orientation.
    """
    out = (
        0.5 * ez.r_max
        * 0.5 * (np.cos(xi) + 1.0)
        * (1.0 + np.sin(0.5 * np.pi - np.asarray(lam) + np.asarray(theta)))
    )
    return out[()] if np.ndim(out) == 0 else out


def constraint_c(state, psi, ez: EngagementZone):
    """Hard path constraint ``rho_max(xi) - d``; feasible when ``<= 0``."""
    d = distance(state)
    return rho_max(aspect_angle(state, psi), ez) - d


def penalty_g(state, psi, ez: EngagementZone):
    """Soft penalty ``rho_max/d - 1`` inside the zone, zero outside."""
    d = distance(state)
    _guard(d)
    rho = rho_max(aspect_angle(state, psi), ez)
    out = np.where(d <= rho, rho / d - 1.0, 0.0)
    return out[()] if np.ndim(out) == 0 else out
