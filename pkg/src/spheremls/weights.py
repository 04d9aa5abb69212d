"""Radial weight functions ``w(y, z) = phi(d(y, z) / delta)``.

A profile is admissible when ``phi > 0`` on [0, 1/2] and ``phi = 0`` on
[1, pi]; the first property keeps enough nodes active per local solve,
the second makes the weight vanish outside the geodesic cap of radius
``delta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import geodesic_distance

__all__ = [
    "WeightProfile",
    "ProfileReport",
    "hat_squared",
    "hat_power",
    "custom_profile",
    "weight",
    "validate_profile",
]


@dataclass(frozen=True, eq=False)
class WeightProfile:
    """Radial profile ``phi`` plus the support radius ``delta`` in radians.

    ``kind`` is one of ``"hat_squared"``, ``"hat_power"``, ``"custom"``.
    Use the factory functions below instead of constructing directly.
    """

    kind: str
    support_delta: float | None = None
    power: float = 2.0
    table_r: np.ndarray | None = field(default=None, repr=False)
    table_values: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("hat_squared", "hat_power", "custom"):
            raise ValueError(f"unknown weight profile kind {self.kind!r}")
        if self.support_delta is not None and not self.support_delta > 0:
            raise ValueError("support_delta must be positive")
        if self.kind == "hat_power" and self.power < 1:
            raise ValueError("hat_power exponent must be >= 1")
        if self.kind == "custom":
            if self.table_r is None or self.table_values is None:
                raise ValueError("custom profile needs tabulated r and values")

    def phi(self, r):
        """Evaluate the radial profile at ``r >= 0`` (scalar or array)."""
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise ValueError("phi is defined for r >= 0 only")
        if self.kind == "hat_squared":
            out = np.maximum(1.0 - r, 0.0) ** 2
        elif self.kind == "hat_power":
            out = np.maximum(1.0 - r, 0.0) ** self.power
        else:
            out = np.interp(r, self.table_r, self.table_values,
                            right=float(self.table_values[-1]))
        return float(out) if out.ndim == 0 else out

    def with_delta(self, delta: float) -> "WeightProfile":
        """Copy of this profile with support radius ``delta``."""
        if not delta > 0:
            raise ValueError("support_delta must be positive")
        return replace(self, support_delta=delta)


def hat_squared(delta: float | None = None) -> WeightProfile:
    """``phi(r) = max(1 - r, 0)^2``, the default profile."""
    return WeightProfile("hat_squared", support_delta=delta)


def hat_power(power: float, delta: float | None = None) -> WeightProfile:
    """``phi(r) = max(1 - r, 0)^p`` with ``p >= 1``."""
    return WeightProfile("hat_power", support_delta=delta, power=power)


def custom_profile(r, values, delta: float | None = None) -> WeightProfile:
    """Tabulated profile, evaluated by linear interpolation.

    ``r`` must be ascending and start at 0; values outside the table are
    held at the last tabulated value.  Run :func:`validate_profile` before
    using a custom profile in a solve.
    """
    r = np.asarray(r, dtype=float)
    values = np.asarray(values, dtype=float)
    if r.ndim != 1 or r.shape != values.shape or r.size < 2:
        raise ValueError("need matching 1-d arrays with at least 2 entries")
    if r[0] != 0.0 or np.any(np.diff(r) <= 0):
        raise ValueError("r grid must be ascending and start at 0")
    r = r.copy()
    values = values.copy()
    r.flags.writeable = False
    values.flags.writeable = False
    return WeightProfile("custom", support_delta=delta,
                         table_r=r, table_values=values)


def weight(profile: WeightProfile, y, z) -> float:
    """``phi(d(y, z) / delta)`` using the profile's own support radius."""
    if profile.support_delta is None:
        raise ValueError("profile has no support_delta set; use with_delta")
    return float(profile.phi(geodesic_distance(y, z) / profile.support_delta))


@dataclass(frozen=True)
class ProfileReport:
    """Outcome of :func:`validate_profile`; ``violations`` holds (r, phi(r), reason)."""

    ok: bool
    violations: tuple = ()


def validate_profile(profile: WeightProfile,
                     grid_size: int = 10_000) -> ProfileReport:
    """Check the admissibility conditions on a dense grid of [0, pi].

    Reports every sampled ``r`` where ``phi(r) <= 0`` on [0, 1/2] or
    ``phi(r) != 0`` on [1, pi].
    """
    r = np.linspace(0.0, np.pi, grid_size)
    values = np.asarray(profile.phi(r), dtype=float)
    bad = []
    inner = r <= 0.5
    for ri, vi in zip(r[inner & (values <= 0)], values[inner & (values <= 0)]):
        bad.append((float(ri), float(vi), "phi must be positive on [0, 1/2]"))
    outer = r >= 1.0
    for ri, vi in zip(r[outer & (values != 0)], values[outer & (values != 0)]):
        bad.append((float(ri), float(vi), "phi must vanish on [1, pi]"))
    return ProfileReport(ok=not bad, violations=tuple(bad))
