import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oam_metrology import crosscheck
from oam_metrology.optical_elements import DoveAngle, beam_splitter, compose_interferometer
from oam_metrology.oracle import (
    PHOTON_CAP,
    compositions,
    full_distribution,
    output_amplitudes,
    permanent,
    transition_amplitude,
)
from oam_metrology.spdc_source import four_photon_state, two_photon_state


def naive_permanent(m):
    n = m.shape[0]
    return sum(math.prod(m[i, p[i]] for i in range(n)) for p in itertools.permutations(range(n)))


def test_permanent_2x2():
    a, b, c, d = 1 + 2j, -0.5, 3j, 0.25 - 1j
    assert permanent(np.array([[a, b], [c, d]])) == pytest.approx(a * d + b * c)


def test_permanent_identity_and_empty():
    assert permanent(np.eye(5)) == pytest.approx(1.0)
    assert permanent(np.ones((4, 4))) == pytest.approx(24.0)
    assert permanent(np.zeros((0, 0))) == 1


def test_permanent_rejects_non_square():
    with pytest.raises(ValueError):
        permanent(np.ones((2, 3)))


complex_entries = st.builds(complex, st.floats(-2, 2), st.floats(-2, 2))


@given(st.integers(1, 5).flatmap(lambda n: arrays(complex, (n, n), elements=complex_entries)))
@settings(max_examples=60)
def test_permanent_matches_factorial_sum(m):
    assert abs(permanent(m) - naive_permanent(m)) <= 1e-9 * (1 + abs(naive_permanent(m)))


def test_compositions_count():
    pats = list(compositions(4, 4))
    assert len(pats) == math.comb(7, 3) == 35
    assert len(set(pats)) == 35
    assert all(sum(p) == 4 for p in pats)


def test_single_photon_beam_splitter_column():
    bs = beam_splitter().entries
    for k, out in enumerate(compositions(1, 4)):
        j = out.index(1)
        assert transition_amplitude(bs, (1, 0, 0, 0), out) == pytest.approx(bs[j, 0])


def test_hong_ou_mandel_dip():
    # one photon in each input of a 50:50 splitter never leaves one in each output
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    u = np.eye(4, dtype=complex)
    u[np.ix_([0, 2], [0, 2])] = h
    assert abs(transition_amplitude(u, (1, 0, 1, 0), (1, 0, 1, 0))) < 1e-15
    assert abs(transition_amplitude(u, (1, 0, 1, 0), (2, 0, 0, 0))) ** 2 == pytest.approx(0.5)


def test_photon_number_mismatch_is_zero():
    assert transition_amplitude(np.eye(4), (1, 1, 0, 0), (1, 0, 0, 0)) == 0


@pytest.mark.parametrize("l", [1, 2])
def test_two_photon_coincidence_via_oracle(l):
    for theta in np.linspace(0, math.pi, 13):
        u = compose_interferometer(DoveAngle(theta, l))
        # (s+ i- + s- i+)/sqrt(2) in (s+, s-, i+, i-) occupation tuples
        dist = full_distribution(u, {(1, 0, 0, 1): 2 ** -0.5, (0, 1, 1, 0): 2 ** -0.5})
        # output order a+, a-, b+, b-
        assert dist[(1, 0, 0, 1)] == pytest.approx(0.5 * math.cos(2 * l * theta) ** 2, abs=1e-12)
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("l", [1, 3])
def test_four_photon_coincidence_via_oracle(l):
    state = {(2, 0, 0, 2): 0.5, (0, 2, 2, 0): 0.5, (1, 1, 1, 1): 2 ** -0.5}
    for theta in np.linspace(0, math.pi, 11):
        dist = full_distribution(compose_interferometer(DoveAngle(theta, l)), state)
        assert len(dist) == 35
        assert dist[(3, 0, 0, 1)] == pytest.approx(3 / 32 * math.sin(4 * l * theta) ** 2, abs=1e-12)
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)


def test_photon_cap():
    with pytest.raises(ValueError):
        output_amplitudes(np.eye(4), {(PHOTON_CAP + 1, 0, 0, 0): 1.0})
    with pytest.raises(ValueError):
        output_amplitudes(np.eye(4), {})


def test_rejects_wrong_shape():
    with pytest.raises(ValueError):
        transition_amplitude(np.eye(3), (1, 0, 0), (1, 0, 0))


@pytest.mark.parametrize("state_of", [two_photon_state, four_photon_state])
def test_crosscheck_agrees(state_of):
    res = crosscheck.compare(state_of(2), 2, np.linspace(0, math.pi, 17))
    assert res.passed()
    assert res.max_amp_error < 1e-12


def test_crosscheck_detects_perturbation():
    def bad(angle):
        m = compose_interferometer(angle).entries.copy()
        m[0, 0] += 1e-3
        return m

    res = crosscheck.compare(two_photon_state(1), 1, [0.3], bad)
    assert not res.passed()
    assert res.worst.theta == 0.3
