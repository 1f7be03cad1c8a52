"""Creation-operator polynomials over labelled OAM modes and their Fock images.

Coefficients are complex scalars. They may also be numpy arrays of a common
shape, in which case every operation is carried out elementwise; this is how
a whole theta grid is pushed through the algebra in one pass.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

PRUNE_TOL = 1e-14


class BasisMismatchError(ValueError):
    """Input-arm and output-arm operators were mixed in one expression."""


class Arm(enum.IntEnum):
    SIGNAL = 0
    IDLER = 1
    OUT_A = 2
    OUT_B = 3

    @property
    def is_input(self) -> bool:
        return self in (Arm.SIGNAL, Arm.IDLER)

    @property
    def letter(self) -> str:
        return "siab"[self.value]


class Sign(enum.IntEnum):
    PLUS = 1
    MINUS = -1

    @property
    def symbol(self) -> str:
        return "+" if self is Sign.PLUS else "-"


_ARM_BY_LETTER = {arm.letter: arm for arm in Arm}


@dataclass(frozen=True, order=True)
class ModeId:
    """One optical mode: an arm, the sign of the OAM index and its magnitude."""

    arm: Arm
    sign: Sign
    l: int = 1

    def __post_init__(self):
        if self.l < 0:
            raise ValueError(f"OAM magnitude must be >= 0, got {self.l}")

    @property
    def is_input(self) -> bool:
        return self.arm.is_input

    @property
    def oam(self) -> int:
        return int(self.sign) * self.l

    @classmethod
    def parse(cls, label: str, l: int = 1) -> "ModeId":
        """Parse labels such as ``"a+"`` or ``"i-"``."""
        label = label.strip()
        if len(label) != 2 or label[0] not in _ARM_BY_LETTER or label[1] not in "+-":
            raise ValueError(f"bad mode label {label!r}; expected e.g. 'a+', 'b-'")
        sign = Sign.PLUS if label[1] == "+" else Sign.MINUS
        return cls(_ARM_BY_LETTER[label[0]], sign, l)

    def __str__(self) -> str:
        return f"{self.arm.letter}{self.sign.symbol}{self.l}"


def _is_zero(c) -> bool:
    return bool(np.all(np.abs(c) < PRUNE_TOL))


def _canonical(powers: Mapping[ModeId, int] | Iterable[tuple[ModeId, int]]) -> tuple:
    items = powers.items() if isinstance(powers, Mapping) else powers
    merged: dict[ModeId, int] = {}
    for m, n in items:
        if n < 0:
            raise ValueError(f"negative exponent {n} on mode {m}")
        if n:
            merged[m] = merged.get(m, 0) + n
    return tuple(sorted(merged.items()))


def _freeze(terms: dict) -> Mapping:
    return MappingProxyType({k: v for k, v in terms.items() if not _is_zero(v)})


class OperatorPolynomial:
    """Complex-weighted sum of commuting creation-operator monomials.

    Keys of :attr:`terms` are canonical sorted ``((mode, power), ...)`` tuples,
    so two monomials built in different orders hash identically.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping | None = None):
        acc: dict = {}
        for key, c in (terms or {}).items():
            k = _canonical(key)
            acc[k] = acc.get(k, 0) + c
        self._terms = _freeze(acc)

    @classmethod
    def monomial(cls, powers: Mapping[ModeId, int], coefficient=1.0) -> "OperatorPolynomial":
        return cls({_canonical(powers): coefficient})

    @classmethod
    def creation(cls, mode: ModeId, coefficient=1.0) -> "OperatorPolynomial":
        return cls.monomial({mode: 1}, coefficient)

    @classmethod
    def one(cls) -> "OperatorPolynomial":
        return cls({(): 1.0})

    @property
    def terms(self) -> Mapping:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __bool__(self) -> bool:
        return bool(self._terms)

    def modes(self) -> set[ModeId]:
        return {m for key in self._terms for m, _ in key}

    def degrees(self) -> set[int]:
        return {sum(n for _, n in key) for key in self._terms}

    def coefficient(self, powers: Mapping[ModeId, int]):
        return self._terms.get(_canonical(powers), 0.0)

    def __add__(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        if not isinstance(other, OperatorPolynomial):
            return NotImplemented
        acc = dict(self._terms)
        for k, c in other._terms.items():
            acc[k] = acc[k] + c if k in acc else c
        return _from_canonical(acc)

    def __neg__(self) -> "OperatorPolynomial":
        return _from_canonical({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "OperatorPolynomial":
        if isinstance(other, OperatorPolynomial):
            acc: dict = {}
            for k1, c1 in self._terms.items():
                for k2, c2 in other._terms.items():
                    k = _canonical(k1 + k2)
                    c = c1 * c2
                    acc[k] = acc[k] + c if k in acc else c
            return _from_canonical(acc)
        return _from_canonical({k: c * other for k, c in self._terms.items()})

    def __rmul__(self, scalar) -> "OperatorPolynomial":
        return _from_canonical({k: scalar * c for k, c in self._terms.items()})

    def __pow__(self, n: int) -> "OperatorPolynomial":
        if n < 0:
            raise ValueError("negative power")
        result = OperatorPolynomial.one()
        for _ in range(n):
            result = result * self
        return result

    def allclose(self, other: "OperatorPolynomial", atol: float = 1e-12) -> bool:
        keys = set(self._terms) | set(other._terms)
        return all(
            np.allclose(self._terms.get(k, 0.0), other._terms.get(k, 0.0), atol=atol, rtol=0)
            for k in keys
        )

    def substitute(self, table: Mapping[ModeId, "OperatorPolynomial"]) -> "OperatorPolynomial":
        """Replace every creation operator by its image in ``table`` and expand."""
        cache: dict[tuple[ModeId, int], OperatorPolynomial] = {}

        def power(m: ModeId, n: int) -> OperatorPolynomial:
            if (m, n) not in cache:
                if m not in table:
                    raise KeyError(f"no substitution for mode {m}")
                cache[(m, n)] = table[m] ** n
            return cache[(m, n)]

        result = OperatorPolynomial()
        for key, c in self._terms.items():
            prod = OperatorPolynomial.one() * c
            for m, n in key:
                prod = prod * power(m, n)
            result = result + prod
        return result

    def __repr__(self) -> str:
        if not self._terms:
            return "OperatorPolynomial(0)"
        parts = []
        for key, c in self._terms.items():
            ops = "".join(f"{m}^{n}" if n > 1 else f"{m}" for m, n in key) or "1"
            parts.append(f"({c})*{ops}")
        return "OperatorPolynomial(" + " + ".join(parts) + ")"


def _from_canonical(acc: dict) -> OperatorPolynomial:
    p = OperatorPolynomial.__new__(OperatorPolynomial)
    p._terms = _freeze(acc)
    return p


def poly_add(p: OperatorPolynomial, q: OperatorPolynomial) -> OperatorPolynomial:
    return p + q


def poly_mul(p: OperatorPolynomial, q: OperatorPolynomial) -> OperatorPolynomial:
    return p * q


class FockStateVector:
    """Superposition of occupation patterns (``((mode, count), ...)`` keys)."""

    __slots__ = ("_amps",)

    def __init__(self, amplitudes: Mapping | None = None):
        acc: dict = {}
        for key, a in (amplitudes or {}).items():
            k = _canonical(key)
            acc[k] = acc.get(k, 0) + a
        self._amps = _freeze(acc)

    @property
    def amplitudes(self) -> Mapping:
        return self._amps

    def __len__(self) -> int:
        return len(self._amps)

    def __iter__(self):
        return iter(self._amps.items())

    def amplitude(self, pattern: Mapping[ModeId, int]):
        return self._amps.get(_canonical(pattern), 0.0)

    def photon_numbers(self) -> set[int]:
        return {sum(n for _, n in key) for key in self._amps}

    def modes(self) -> set[ModeId]:
        return {m for key in self._amps for m, _ in key}

    def norm_squared(self):
        return norm_squared(self)

    def normalized(self) -> "FockStateVector":
        nrm = np.sqrt(self.norm_squared())
        if np.any(nrm == 0):
            raise ValueError("cannot normalize a zero vector")
        return FockStateVector({k: a / nrm for k, a in self._amps.items()})

    def probabilities(self) -> dict:
        return {k: np.abs(a) ** 2 for k, a in self._amps.items()}

    def to_tuples(self, basis: tuple[ModeId, ...]) -> dict[tuple[int, ...], complex]:
        """Occupation-vector view over an ordered mode basis (for the oracle)."""
        index = {m: i for i, m in enumerate(basis)}
        out = {}
        for key, a in self._amps.items():
            counts = [0] * len(basis)
            for m, n in key:
                if m not in index:
                    raise KeyError(f"mode {m} not in basis")
                counts[index[m]] = n
            out[tuple(counts)] = a
        return out

    def __repr__(self) -> str:
        return f"FockStateVector({len(self._amps)} patterns, photons={sorted(self.photon_numbers())})"


def apply_to_vacuum(p: OperatorPolynomial) -> FockStateVector:
    """Act with ``p`` on the vacuum: (a^dag)^n |vac> = sqrt(n!) |n>.

    Raw amplitudes are kept; no normalization is applied.
    """
    kinds = {m.is_input for m in p.modes()}
    if len(kinds) > 1:
        raise BasisMismatchError("polynomial mixes input-arm and output-arm operators")
    amps = {}
    for key, c in p:
        amps[key] = c * math.sqrt(math.prod(math.factorial(n) for _, n in key))
    v = FockStateVector.__new__(FockStateVector)
    v._amps = _freeze(amps)
    return v


def norm_squared(v: FockStateVector):
    total = 0.0
    for _, a in v:
        total = total + np.abs(a) ** 2
    return total
