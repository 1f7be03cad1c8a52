"""Down-converted input states written as creation-operator polynomials on the
signal and idler arms (pump OAM fixed at zero, so signal +l pairs with idler -l).
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .operator_algebra import Arm, ModeId, OperatorPolynomial, Sign, apply_to_vacuum

log = logging.getLogger(__name__)

WEIGHT_TOL = 1e-12


def _s(sign: Sign, l: int) -> OperatorPolynomial:
    return OperatorPolynomial.creation(ModeId(Arm.SIGNAL, sign, l))


def _i(sign: Sign, l: int) -> OperatorPolynomial:
    return OperatorPolynomial.creation(ModeId(Arm.IDLER, sign, l))


def _check_l(l: int, allow_degenerate: bool) -> None:
    if int(l) != l or l < 0:
        raise ValueError(f"l must be a non-negative integer, got {l!r}")
    if l == 0 and not allow_degenerate:
        raise ValueError("l = 0 makes the +l and -l branches identical; pass allow_degenerate=True to build it anyway")


@dataclass(frozen=True)
class OamDistribution:
    """Pair-production weights ``P_l`` and optionally joint ``P_{l,l'}``."""

    weights: Mapping[int, float]
    joint: Mapping[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        for name, table in (("weights", self.weights), ("joint", self.joint)):
            if not table:
                continue
            if any(p < 0 for p in table.values()):
                raise ValueError(f"{name} must be non-negative")
            total = math.fsum(table.values())
            if abs(total - 1.0) > WEIGHT_TOL:
                raise ValueError(f"{name} sum to {total!r}, not 1")
        if not self.weights:
            raise ValueError("empty OAM distribution")
        if any(int(l) != l or l < 1 for l in self.weights):
            raise ValueError("OAM indices in a distribution must be positive integers")

    @classmethod
    def from_dict(cls, doc: Mapping) -> "OamDistribution":
        weights = {int(k): float(v) for k, v in doc["weights"].items()}
        joint = {}
        for k, v in doc.get("joint", {}).items():
            a, b = (int(x) for x in k.split(","))
            joint[(a, b)] = float(v)
        return cls(weights, joint)

    @classmethod
    def from_json(cls, path: str | Path) -> "OamDistribution":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        doc = {"weights": {str(l): p for l, p in sorted(self.weights.items())}}
        if self.joint:
            doc["joint"] = {f"{a},{b}": p for (a, b), p in sorted(self.joint.items())}
        return doc


def two_photon_state(l: int, allow_degenerate: bool = False) -> OperatorPolynomial:
    """(s+ i- + s- i+)/sqrt(2) for a single OAM magnitude ``l``."""
    _check_l(l, allow_degenerate)
    c = 1 / math.sqrt(2)
    return c * (_s(Sign.PLUS, l) * _i(Sign.MINUS, l) + _s(Sign.MINUS, l) * _i(Sign.PLUS, l))


def four_photon_state(l: int, convention: str = "ket", allow_degenerate: bool = False) -> OperatorPolynomial:
    """Normalized four-photon state restricted to OAM magnitude ``l``.

    ``convention="ket"`` reads the state as four Fock kets of amplitude 1/2:
    amplitude 1/2 on |2>_{s+}|2>_{i-} and |2>_{s-}|2>_{i+}, and the two identical
    cross kets together carry probability 1/2 on |1,1,1,1>. This is normalized
    as-is and puts 3/32 of the intensity on the (3, 1) coincidence at best.

    ``convention="operator"`` takes the operator form
    ``(1/2)[s+^2 i-^2 + s-^2 i+^2 + 2 s+ s- i- i+]`` literally and rescales it
    to unit norm (raw norm^2 is 3); its (3, 1) coincidence peaks at 1/8.
    """
    _check_l(l, allow_degenerate)
    sp, sm, ip, im = _s(Sign.PLUS, l), _s(Sign.MINUS, l), _i(Sign.PLUS, l), _i(Sign.MINUS, l)
    if convention == "ket":
        # Fock amplitude 1/2 on |2,2> means operator weight 1/2 / (sqrt(2!) sqrt(2!))
        return 0.25 * (sp * sp * im * im + sm * sm * ip * ip) + (1 / math.sqrt(2)) * (sp * sm * ip * im)
    if convention == "operator":
        raw = 0.5 * (sp * sp * im * im + sm * sm * ip * ip + 2.0 * (sp * sm * im * ip))
        norm2 = apply_to_vacuum(raw).norm_squared()
        log.info("four-photon operator-form state renormalized by 1/sqrt(%g)", norm2)
        return (1 / math.sqrt(norm2)) * raw
    raise ValueError(f"unknown convention {convention!r}; use 'ket' or 'operator'")


def mixed_l_two_photon(dist: OamDistribution) -> OperatorPolynomial:
    """sum_l sqrt(P_l) s+l i-l over the modes carrying each magnitude ``l``."""
    if not isinstance(dist, OamDistribution):
        dist = OamDistribution(dict(dist))
    state = OperatorPolynomial()
    for l, p in sorted(dist.weights.items()):
        if p > 0:
            state = state + math.sqrt(p) * (_s(Sign.PLUS, l) * _i(Sign.MINUS, l))
    return state


def total_oam(powers) -> int:
    return sum(m.oam * n for m, n in powers)
