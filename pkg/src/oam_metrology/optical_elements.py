"""4x4 OAM mode transforms: beam splitter, mirror pair, Dove prism, and the
two-beam-splitter interferometer they compose into.

Every 4x4 acts on the column of annihilation operators ordered
``(x+l, x-l, y+l, y-l)`` for the two arms ``x, y`` it connects. A ``theta``
array yields a stacked transform of shape ``theta.shape + (4, 4)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .operator_algebra import Arm, ModeId, OperatorPolynomial, Sign

UNITARY_TOL = 1e-12

_BS = np.array(
    [[0, 1j, 1, 0],
     [1j, 0, 0, 1],
     [1, 0, 0, 1j],
     [0, 1, 1j, 0]],
    dtype=complex,
) / np.sqrt(2)

_MIRROR = -np.array(
    [[0, 1, 0, 0],
     [1, 0, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0]],
    dtype=complex,
)


def input_basis(l: int = 1) -> tuple[ModeId, ...]:
    return tuple(ModeId(arm, sign, l) for arm in (Arm.SIGNAL, Arm.IDLER) for sign in (Sign.PLUS, Sign.MINUS))


def output_basis(l: int = 1) -> tuple[ModeId, ...]:
    return tuple(ModeId(arm, sign, l) for arm in (Arm.OUT_A, Arm.OUT_B) for sign in (Sign.PLUS, Sign.MINUS))


@dataclass(frozen=True)
class DoveAngle:
    """Dove-prism rotation ``theta`` (radians, scalar or array) and OAM magnitude ``l``."""

    theta: float | np.ndarray
    l: int = 1

    def __post_init__(self):
        if int(self.l) != self.l or self.l < 0:
            raise ValueError(f"l must be a non-negative integer, got {self.l!r}")

    @property
    def degenerate(self) -> bool:
        return self.l == 0

    @property
    def phase(self):
        """exp(2 i l theta)."""
        return np.exp(2j * self.l * np.asarray(self.theta, dtype=float))


@dataclass(frozen=True)
class ModeTransform:
    entries: np.ndarray
    input_basis: tuple = field(default=("in1+", "in1-", "in2+", "in2-"))
    output_basis: tuple = field(default=("out1+", "out1-", "out2+", "out2-"))
    name: str = ""

    def __post_init__(self):
        if self.entries.shape[-2:] != (4, 4):
            raise ValueError(f"mode transforms are 4x4, got shape {self.entries.shape}")

    def __matmul__(self, other: "ModeTransform") -> "ModeTransform":
        return ModeTransform(
            self.entries @ other.entries,
            input_basis=other.input_basis,
            output_basis=self.output_basis,
            name=f"{self.name}*{other.name}",
        )

    @property
    def dagger(self) -> np.ndarray:
        return np.conj(np.swapaxes(self.entries, -1, -2))

    def unitarity_error(self) -> float:
        prod = self.entries @ self.dagger
        return float(np.max(np.abs(prod - np.eye(4))))

    def det_error(self) -> float:
        return float(np.max(np.abs(np.abs(np.linalg.det(self.entries)) - 1.0)))

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        return self.unitarity_error() <= tol and self.det_error() <= tol

    def column(self, j: int) -> np.ndarray:
        return self.entries[..., :, j]


def beam_splitter() -> ModeTransform:
    """Symmetric 50:50 splitter; reflection flips the OAM sign and adds phase i."""
    return ModeTransform(_BS.copy(), ("a+", "a-", "b+", "b-"), ("c+", "c-", "d+", "d-"), "bs")


def mirror_pair() -> ModeTransform:
    """One mirror per arm; each reflection flips the OAM sign with phase pi."""
    return ModeTransform(_MIRROR.copy(), ("a+", "a-", "b+", "b-"), ("c+", "c-", "d+", "d-"), "mir")


def dove_prism(angle: DoveAngle) -> ModeTransform:
    """Prism rotated by ``theta`` in the first arm; the second arm is untouched."""
    e = angle.phase
    m = np.zeros(np.shape(e) + (4, 4), dtype=complex)
    m[..., 0, 1] = -e
    m[..., 1, 0] = -np.conj(e)
    m[..., 2, 2] = 1.0
    m[..., 3, 3] = 1.0
    return ModeTransform(m, ("g+", "g-", "h+", "h-"), ("g+", "g-", "h+", "h-"), "dp")


def default_stages(angle: DoveAngle) -> list[ModeTransform]:
    """Elements in the order light meets them: mir, BS1, mir, Dove prism, BS2."""
    return [mirror_pair(), beam_splitter(), mirror_pair(), dove_prism(angle), beam_splitter()]


def compose_interferometer(angle: DoveAngle, stages: Sequence[ModeTransform] | None = None) -> ModeTransform:
    """Total transform ``O = M I`` from input arms (s, i) to output arms (a, b).

    ``stages`` lists elements in propagation order (first element acts first);
    the default is ``M = M_bs M_dp(theta) M_mir M_bs M_mir``.
    """
    stages = default_stages(angle) if stages is None else list(stages)
    if not stages:
        raise ValueError("need at least one optical element")
    total = stages[0]
    for element in stages[1:]:
        total = element @ total
    return ModeTransform(
        total.entries,
        input_basis=input_basis(angle.l),
        output_basis=output_basis(angle.l),
        name="interferometer",
    )


def operator_relations(
    angle: DoveAngle, transform: ModeTransform | None = None
) -> dict[ModeId, OperatorPolynomial]:
    """Input creation operators in terms of output ones, from ``I^dag = O^dag M``.

    Column ``j`` of ``M`` gives the output expansion of input operator ``j``.
    """
    if transform is None:
        transform = compose_interferometer(angle)
    ins, outs = input_basis(angle.l), output_basis(angle.l)
    table = {}
    for j, src in enumerate(ins):
        poly = OperatorPolynomial()
        for k, dst in enumerate(outs):
            poly = poly + OperatorPolynomial.creation(dst, transform.entries[..., k, j])
        table[src] = poly
    return table


def substitution_coefficients(angle: DoveAngle, transform: ModeTransform | None = None) -> dict[str, np.ndarray]:
    """Read k1..k4 off the composed transform in the positions where the
    two-term relations ``s+ = k1 a+ + i k2 b-`` and ``i+ = i k4 a- + k3 b+`` put them.
    """
    m = (transform or compose_interferometer(angle)).entries
    return {
        "k1": m[..., 0, 0],
        "k2": m[..., 3, 0] / 1j,
        "k3": m[..., 2, 2],
        "k4": m[..., 1, 2] / 1j,
    }


def analytic_k(angle: DoveAngle) -> dict[str, np.ndarray]:
    """Closed-form relation coefficients, used as a check on the numeric transform."""
    e = angle.phase
    k1 = 0.5 * (-1 - e)
    k2 = 0.5 * (-1 + e)
    return {"k1": k1, "k2": k2, "k3": np.conj(k1), "k4": np.conj(k2)}


def k_pattern_matrix(k: dict[str, np.ndarray]) -> np.ndarray:
    """Transform whose columns are the two-term k relations for (s+, s-, i+, i-)."""
    k1, k2, k3, k4 = (np.asarray(k[name]) for name in ("k1", "k2", "k3", "k4"))
    m = np.zeros(np.shape(k1) + (4, 4), dtype=complex)
    m[..., 0, 0] = k1
    m[..., 3, 0] = 1j * k2
    m[..., 1, 1] = k1
    m[..., 2, 1] = 1j * k2
    m[..., 1, 2] = 1j * k4
    m[..., 2, 2] = k3
    m[..., 0, 3] = 1j * k4
    m[..., 3, 3] = k3
    return m
