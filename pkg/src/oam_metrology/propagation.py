"""Operator substitution through the interferometer and coincidence post-selection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Callable, Mapping, Sequence

import numpy as np

from .operator_algebra import (
    BasisMismatchError,
    FockStateVector,
    ModeId,
    OperatorPolynomial,
    apply_to_vacuum,
)
from .optical_elements import DoveAngle, ModeTransform, compose_interferometer, operator_relations

NORM_TOL = 1e-9

TransformFactory = Callable[[DoveAngle], ModeTransform]


@dataclass(frozen=True)
class DetectionPattern:
    """Photon counts required in each output mode for a coincidence."""

    required: Mapping[ModeId, int]

    def __post_init__(self):
        req = {m: int(n) for m, n in dict(self.required).items()}
        if any(n < 0 for n in req.values()):
            raise ValueError("photon counts must be >= 0")
        if not any(req.values()):
            raise ValueError("a detection pattern needs at least one photon")
        if any(m.is_input for m in req):
            raise BasisMismatchError("detection patterns live on output arms a and b")
        object.__setattr__(self, "required", MappingProxyType({m: n for m, n in req.items() if n}))

    @property
    def photons(self) -> int:
        return sum(self.required.values())

    @classmethod
    def parse(cls, text: str, l: int = 1) -> "DetectionPattern":
        """``"a+:3,b-:1"`` -> three photons in a+l, one in b-l."""
        req = {}
        for item in text.split(","):
            label, _, count = item.partition(":")
            req[ModeId.parse(label, l)] = int(count or 1)
        return cls(req)

    def __str__(self) -> str:
        return ",".join(f"{m.arm.letter}{m.sign.symbol}:{n}" for m, n in sorted(self.required.items()))


@dataclass(frozen=True)
class FringeSample:
    theta: float
    raw: float
    normalized: float

    @property
    def valid(self) -> bool:
        return not math.isnan(self.normalized)


def _check_input_state(state: OperatorPolynomial) -> None:
    if not state:
        raise ValueError("empty input state")
    if not all(m.is_input for m in state.modes()):
        raise BasisMismatchError("propagate expects a state written in signal/idler operators")


def propagate(
    state: OperatorPolynomial,
    theta: float | np.ndarray | DoveAngle,
    transform: TransformFactory | None = None,
    check_norm: bool = True,
) -> FockStateVector:
    """Output Fock vector for an input-arm state at Dove angle ``theta``.

    Each mode's own ``l`` sets its prism phase, so mixed-l states go through
    unchanged. ``transform`` overrides how the composed 4x4 is built.
    """
    _check_input_state(state)
    if isinstance(theta, DoveAngle):
        theta = theta.theta
    if check_norm:
        n2 = apply_to_vacuum(state).norm_squared()
        if not np.allclose(n2, 1.0, atol=NORM_TOL, rtol=0):
            raise ValueError(f"input state is not normalized (norm^2 = {n2})")
    build = transform or compose_interferometer
    table: dict[ModeId, OperatorPolynomial] = {}
    for l in sorted({m.l for m in state.modes()}):
        angle = DoveAngle(theta, l)
        table.update(operator_relations(angle, build(angle)))
    return apply_to_vacuum(state.substitute(table))


def postselect_probability(v: FockStateVector, pattern: DetectionPattern):
    """Expectation of the projector onto ``pattern``; 0 if photon numbers differ."""
    if pattern.photons not in v.photon_numbers():
        return 0.0
    return np.abs(v.amplitude(pattern.required)) ** 2


def _grid(theta_grid) -> np.ndarray:
    grid = np.asarray(theta_grid, dtype=float).ravel()
    if grid.size == 0:
        raise ValueError("empty theta grid")
    if np.unique(grid).size < 2:
        raise ValueError("theta grid needs at least two distinct points")
    return grid


def scan_arrays(
    state: OperatorPolynomial,
    pattern: DetectionPattern,
    theta_grid: Sequence[float] | np.ndarray,
    transform: TransformFactory | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized scan: ``(theta, raw, normalized)``; normalized is NaN if raw is identically 0."""
    grid = _grid(theta_grid)
    out = propagate(state, grid, transform)
    raw = np.broadcast_to(np.asarray(postselect_probability(out, pattern), dtype=float), grid.shape).copy()
    peak = raw.max()
    normalized = raw / peak if peak > 0 else np.full_like(raw, np.nan)
    return grid, raw, normalized


def fringe_scan(
    state: OperatorPolynomial,
    pattern: DetectionPattern,
    theta_grid: Sequence[float] | np.ndarray,
    transform: TransformFactory | None = None,
) -> list[FringeSample]:
    grid, raw, normalized = scan_arrays(state, pattern, theta_grid, transform)
    return [FringeSample(float(t), float(r), float(n)) for t, r, n in zip(grid, raw, normalized)]


def count_maxima(theta, values, period: float = math.pi, level: float = 0.5) -> int:
    """Number of distinct fringe peaks, identifying angles modulo ``period``.

    A peak is a local maximum (endpoints compared with their single neighbour)
    whose value exceeds ``level`` times the scan maximum.
    """
    theta = np.asarray(theta, dtype=float)
    v = np.asarray(values, dtype=float)
    if theta.size < 3:
        raise ValueError("need at least three samples to locate maxima")
    threshold = level * np.nanmax(v)
    left = np.concatenate(([-np.inf], v[:-1]))
    right = np.concatenate((v[1:], [-np.inf]))
    peaks = theta[(v >= left) & (v >= right) & (v > threshold)]
    step = np.min(np.diff(np.sort(theta)))
    wrapped = np.sort(np.mod(peaks, period))
    if wrapped.size == 0:
        return 0
    # plateaus and the 0 / period seam show up as near-duplicate angles
    count = 1 + int(np.sum(np.diff(wrapped) > 2.5 * step))
    if count > 1 and (wrapped[0] + period - wrapped[-1]) <= 2.5 * step:
        count -= 1
    return count
