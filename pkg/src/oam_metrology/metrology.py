"""Angular uncertainty from a sampled coincidence fringe.

For a projector-valued measurement the spread is sqrt(A - A^2), and the angle
error follows from error propagation through the fringe slope, which is taken
by central finite differences on the sample grid.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .propagation import FringeSample

SLOPE_EPS = 1e-6

OK, SINGULAR, EDGE = "ok", "singular", "edge"


class InsensitiveConfigurationError(ValueError):
    """The fringe has no usable slope anywhere on the grid."""


@dataclass(frozen=True)
class SensitivityPoint:
    theta: float
    fringe: float
    dfringe: float
    delta_theta: float
    flag: str = OK


@dataclass
class SensitivityReport:
    samples: list[SensitivityPoint]
    min_delta_theta: float
    theta_at_min: float
    heisenberg_limit: float
    fock_limit: float
    n_photons: int
    l: int
    step: float
    success_probability: float | None = None
    extra: dict = field(default_factory=dict)

    def usable(self) -> list[SensitivityPoint]:
        return [s for s in self.samples if s.flag == OK]

    def to_dict(self, digits: int = 12) -> dict:
        def r(x):
            if x is None or not math.isfinite(x):
                return None
            return float(f"{x:.{digits}g}")

        return {
            "n_photons": self.n_photons,
            "l": self.l,
            "step": r(self.step),
            "min_delta_theta": r(self.min_delta_theta),
            "theta_at_min": r(self.theta_at_min),
            "heisenberg_limit": r(self.heisenberg_limit),
            "fock_limit": r(self.fock_limit),
            "success_probability": r(self.success_probability),
            "samples": [
                {
                    "theta_rad": r(s.theta),
                    "fringe": r(s.fringe),
                    "dfringe": r(s.dfringe),
                    "delta_theta": r(s.delta_theta),
                    "flag": s.flag,
                }
                for s in self.samples
            ],
            **self.extra,
        }

    def to_json(self, digits: int = 12) -> str:
        return json.dumps(self.to_dict(digits), indent=2)

    def to_csv(self, digits: int = 12) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theta_rad", "fringe", "dfringe", "delta_theta", "flag"])
        for s in self.samples:
            w.writerow([f"{s.theta:.{digits}g}", f"{s.fringe:.{digits}g}", f"{s.dfringe:.{digits}g}",
                        f"{s.delta_theta:.{digits}g}", s.flag])
        return buf.getvalue()


def baselines(n_photons: int, l: int) -> tuple[float, float]:
    """(entangled limit 1/(2 N l), one-photon Fock stream 1/(2 sqrt(N) l))."""
    if n_photons < 1 or l < 1:
        raise ValueError("baselines need N >= 1 and l >= 1")
    return 1.0 / (2 * n_photons * l), 1.0 / (2 * math.sqrt(n_photons) * l)


def uncertainty_curve(
    fringe: Sequence[FringeSample],
    n_photons: int,
    l: int,
    slope_eps: float = SLOPE_EPS,
) -> SensitivityReport:
    """Delta-theta along the grid of ``fringe``, computed from its normalized column."""
    if len(fringe) < 3:
        raise ValueError("need at least three fringe samples for central differences")
    if not all(s.valid for s in fringe):
        raise ValueError("fringe has no valid normalized column (raw probability identically zero)")
    theta = np.array([s.theta for s in fringe])
    a = np.array([s.normalized for s in fringe])
    if np.any(np.diff(theta) <= 0):
        raise ValueError("theta grid must be strictly increasing")

    da = np.gradient(a, theta, edge_order=2)
    spread = np.sqrt(np.clip(a - a * a, 0.0, None))
    flags = np.full(theta.shape, OK, dtype=object)
    flags[np.abs(da) < slope_eps] = SINGULAR
    flags[[0, -1]] = EDGE
    with np.errstate(divide="ignore", invalid="ignore"):
        dtheta = np.where(flags == OK, spread / np.abs(da), np.nan)

    samples = [SensitivityPoint(float(t), float(f), float(d), float(x), str(fl))
               for t, f, d, x, fl in zip(theta, a, da, dtheta, flags)]
    ok = flags == OK
    if not ok.any():
        raise InsensitiveConfigurationError("insensitive configuration: fringe slope vanishes on the whole grid")
    i_min = int(np.nanargmin(dtheta))
    heis, fock = baselines(n_photons, l) if l >= 1 else (math.inf, math.inf)
    raw = np.array([s.raw for s in fringe])
    return SensitivityReport(
        samples=samples,
        min_delta_theta=float(dtheta[i_min]),
        theta_at_min=float(theta[i_min]),
        heisenberg_limit=heis,
        fock_limit=fock,
        n_photons=n_photons,
        l=l,
        step=float(np.max(np.diff(theta))),
        success_probability=float(raw.max()),
    )


def noon_offset(n_photons: int) -> float:
    # pi/2 turns cos^2 into sin^2; matches the simulated N=2 and N=4 fringes
    return math.pi / 2 if n_photons % 4 == 0 else 0.0


def ideal_noon_fringe(n_photons: int, l: int, theta_grid) -> list[FringeSample]:
    """cos^2(N l theta + phi0) with unit post-selection efficiency (raw == normalized)."""
    if n_photons < 1 or l < 1:
        raise ValueError("ideal fringe needs N >= 1 and l >= 1")
    theta = np.asarray(theta_grid, dtype=float).ravel()
    if np.unique(theta).size < 2:
        raise ValueError("theta grid needs at least two distinct points")
    a = np.cos(n_photons * l * theta + noon_offset(n_photons)) ** 2
    return [FringeSample(float(t), float(v), float(v)) for t, v in zip(theta, a)]

