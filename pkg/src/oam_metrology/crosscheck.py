"""Substitution pipeline vs permanent oracle, pattern by pattern."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracle
from .operator_algebra import OperatorPolynomial, apply_to_vacuum
from .optical_elements import DoveAngle, ModeTransform, compose_interferometer, input_basis, output_basis
from .propagation import propagate

TOL = 1e-9


@dataclass
class Deviation:
    theta: float
    l: int
    pattern: tuple[int, ...]
    prob_error: float
    amp_error: float


@dataclass
class CrossCheck:
    max_prob_error: float
    max_amp_error: float
    max_sum_error: float
    n_comparisons: int
    worst: Deviation | None

    def passed(self, tol: float = TOL) -> bool:
        return max(self.max_prob_error, self.max_amp_error, self.max_sum_error) <= tol


def compare(
    state: OperatorPolynomial,
    l: int,
    thetas,
    oracle_transform=None,
) -> CrossCheck:
    """Compare every output pattern at every angle.

    ``oracle_transform(angle) -> ModeTransform`` replaces the matrix fed to the
    oracle only, which is how a deliberate mismatch is injected.
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    inp = apply_to_vacuum(state).to_tuples(input_basis(l))
    basis = output_basis(l)
    batch = propagate(state, thetas)
    sub = batch.to_tuples(basis)
    worst = None
    max_p = max_a = max_s = 0.0
    count = 0
    for t_idx, theta in enumerate(thetas):
        angle = DoveAngle(float(theta), l)
        u = (oracle_transform or compose_interferometer)(angle)
        if isinstance(u, ModeTransform):
            u = u.entries
        ref = oracle.output_amplitudes(u, inp)
        got = {k: complex(np.asarray(v).reshape(-1)[t_idx] if np.ndim(v) else v) for k, v in sub.items()}
        # align global phase on the largest oracle amplitude
        anchor = max(ref, key=lambda k: abs(ref[k]))
        phase = 1.0
        if abs(ref[anchor]) > 1e-12 and abs(got.get(anchor, 0)) > 1e-12:
            phase = got[anchor] / ref[anchor]
            phase /= abs(phase)
        max_s = max(max_s, abs(sum(abs(a) ** 2 for a in ref.values()) - 1.0))
        for k in set(ref) | set(got):
            r, g = ref.get(k, 0j), got.get(k, 0j)
            dp = abs(abs(r) ** 2 - abs(g) ** 2)
            da = abs(g - phase * r)
            count += 1
            if worst is None or max(dp, da) > max(worst.prob_error, worst.amp_error):
                worst = Deviation(float(theta), l, k, dp, da)
            max_p, max_a = max(max_p, dp), max(max_a, da)
    return CrossCheck(max_p, max_a, max_s, count, worst)
