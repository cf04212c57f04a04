import math

import numpy as np
import pytest

from strobe import groupmap, su2
from strobe.errors import InvalidParameterError, OutOfRangeError
from strobe.groupmap import MapState, QSequence
from strobe.su2 import IDENTITY, inverse, product


@pytest.fixture
def rng():
    return np.random.default_rng(99)


def rand(rng, n=None):
    return su2.random_elements(rng, n)


def brute_next(r_prev, r_curr, qn, qm):
    """R_{N+1} written out as the seven-factor product."""
    return product(qn, r_curr, qm, r_prev, inverse(qm), inverse(r_curr), inverse(qn))


def test_step_with_identity_q_is_conjugation(rng):
    r0, r1 = rand(rng), rand(rng)
    out = groupmap.step(MapState(1, r0, r1), QSequence.constant(IDENTITY))
    np.testing.assert_allclose(out.r_curr, product(r1, r0, inverse(r1)), atol=1e-14)
    assert out.n == 2
    np.testing.assert_array_equal(out.r_prev, r1)


def test_step_from_identity_state():
    out = groupmap.step(MapState(1, IDENTITY, IDENTITY), QSequence.constant(IDENTITY))
    np.testing.assert_allclose(out.r_curr, IDENTITY, atol=1e-15)


def test_step_matches_expanded_product(rng):
    q = rand(rng, 30)
    qs = QSequence.explicit(q, minus_one=rand(rng))
    state = MapState(1, rand(rng), rand(rng))
    for n in range(1, 25):
        nxt = groupmap.step(state, qs)
        np.testing.assert_allclose(nxt.r_curr, brute_next(state.r_prev, state.r_curr, qs[n], qs[n - 1]), atol=1e-13)
        state = nxt


def test_step_agrees_with_simplified_solution_at_k1(rng):
    q, r0, r1 = rand(rng), rand(rng), rand(rng)
    p = groupmap.p_of(q, r0, r1)
    r2 = groupmap.step(MapState(1, r0, r1), QSequence.constant(q)).r_curr
    np.testing.assert_allclose(r2, groupmap.simplified_solution(1, "even", q, p, r0=r0), atol=1e-12)


def test_step_back_round_trip(rng):
    qs = QSequence.explicit(rand(rng, 10), minus_one=rand(rng))
    state = MapState(4, rand(rng), rand(rng))
    back = groupmap.step_back(groupmap.step(state, qs), qs)
    assert back.n == state.n
    np.testing.assert_allclose(back.r_prev, state.r_prev, atol=1e-12)
    np.testing.assert_allclose(back.r_curr, state.r_curr, atol=1e-12)


def test_step_back_identity_state():
    state = MapState(3, IDENTITY, IDENTITY)
    out = groupmap.step_back(state, QSequence.constant(IDENTITY))
    np.testing.assert_allclose(out.r_prev, IDENTITY, atol=1e-15)


@pytest.mark.parametrize("kind", ["constant", "alternating", "explicit"])
def test_hundred_forward_then_back(rng, kind):
    if kind == "constant":
        qs = QSequence.constant(rand(rng))
    elif kind == "alternating":
        qs = QSequence.alternating(rand(rng), rand(rng))
    else:
        qs = QSequence.explicit(rand(rng, 120), minus_one=rand(rng))
    start = MapState(1, rand(rng), rand(rng))
    state = start
    for _ in range(100):
        state = groupmap.step(state, qs)
    for _ in range(100):
        state = groupmap.step_back(state, qs)
    assert state.n == start.n
    np.testing.assert_allclose(state.r_prev, start.r_prev, atol=1e-9)
    np.testing.assert_allclose(state.r_curr, start.r_curr, atol=1e-9)


def test_qsequence_indexing():
    s, t = su2.exp_axis_angle([1, 0, 0], 0.2), su2.exp_axis_angle([0, 1, 0], 0.3)
    alt = QSequence.alternating(s, t)
    np.testing.assert_array_equal(alt[0], s)
    np.testing.assert_array_equal(alt[7], t)
    np.testing.assert_array_equal(alt[-1], t)
    exp = QSequence.explicit([s, t])
    np.testing.assert_array_equal(exp[-1], s)
    assert exp.last_index == 1
    with pytest.raises(OutOfRangeError):
        exp[2]
    with pytest.raises(OutOfRangeError):
        alt[-2]


def test_s_of_identity_and_recursion(rng):
    qs = QSequence.constant(IDENTITY)
    np.testing.assert_allclose(groupmap.s_of(IDENTITY, IDENTITY, qs, 1).s, IDENTITY, atol=1e-15)
    qs = QSequence.explicit(rand(rng, 12), minus_one=rand(rng))
    r = groupmap.iterate(rand(rng), rand(rng), qs, 10)
    for n in range(1, 10):
        s_n = groupmap.s_of(r[n], r[n - 1], qs, n).s
        s_next = groupmap.s_of(r[n + 1], r[n], qs, n + 1).s
        np.testing.assert_allclose(s_next, product(qs[n], s_n, inverse(qs[n - 2])), atol=1e-12)
    with pytest.raises(OutOfRangeError):
        groupmap.s_of(IDENTITY, IDENTITY, qs, 0)


def test_rs_step_identity_freezes_r(rng):
    r = rand(rng)
    r_next, s_next = groupmap.rs_step(r, IDENTITY, QSequence.constant(IDENTITY), 3)
    np.testing.assert_allclose(r_next, r, atol=1e-15)
    np.testing.assert_allclose(s_next, IDENTITY, atol=1e-15)


def test_rs_orbit_matches_direct_iteration(rng):
    qs = QSequence.explicit(rand(rng, 60), minus_one=rand(rng))
    r0, r1 = rand(rng), rand(rng)
    direct = groupmap.iterate(r0, r1, qs, 50)
    reduced, _ = groupmap.rs_orbit(r0, r1, qs, 50)
    np.testing.assert_allclose(reduced[::2], direct[::2], atol=1e-10)


def test_constant_q_s_telescopes(rng):
    q = rand(rng)
    qs = QSequence.constant(q)
    _, s = groupmap.rs_orbit(rand(rng), rand(rng), qs, 12)
    for n in range(3, 13):
        expect = product(su2.power(q, n - 2), s[2], su2.power(q, -(n - 2)))
        np.testing.assert_allclose(s[n], expect, atol=1e-12)


def test_closed_s_lowest_index(rng):
    qs = QSequence.explicit(rand(rng, 4), minus_one=rand(rng))
    s1 = rand(rng)
    np.testing.assert_allclose(groupmap.closed_s(2, s1, qs), product(qs[1], s1, inverse(qs[-1])), atol=1e-14)


def test_closed_s_constant_q_at_five(rng):
    # N = 5 carries four factors of Q on each side
    q, s1 = rand(rng), rand(rng)
    got = groupmap.closed_s(5, s1, QSequence.constant(q))
    np.testing.assert_allclose(got, product(su2.power(q, 4), s1, su2.power(q, -4)), atol=1e-12)


def test_closed_s_alternating_matches_recursion(rng):
    qs = QSequence.alternating(rand(rng), rand(rng))
    r0, r1 = rand(rng), rand(rng)
    _, s = groupmap.rs_orbit(r0, r1, qs, 20)
    for n in range(2, 21):
        np.testing.assert_allclose(groupmap.closed_s(n, s[1], qs), s[n], atol=1e-12)


def test_closed_s_rejects_low_index(rng):
    with pytest.raises(OutOfRangeError):
        groupmap.closed_s(1, IDENTITY, QSequence.constant(IDENTITY))


def test_closed_r_even_cases(rng):
    r0 = rand(rng)
    s2 = rand(rng)
    np.testing.assert_allclose(groupmap.closed_r_even(1, r0, {2: s2}), product(s2, r0, inverse(s2)), atol=1e-14)
    ident = {2 * j: IDENTITY for j in range(1, 6)}
    np.testing.assert_allclose(groupmap.closed_r_even(5, r0, ident), r0, atol=1e-14)
    with pytest.raises(OutOfRangeError):
        groupmap.closed_r_even(3, r0, {2: s2})


def test_closed_r_even_matches_direct_orbit(rng):
    qs = QSequence.explicit(rand(rng, 60), minus_one=rand(rng))
    r0, r1 = rand(rng), rand(rng)
    direct = groupmap.iterate(r0, r1, qs, 50)
    _, s = groupmap.rs_orbit(r0, r1, qs, 50)
    np.testing.assert_allclose(groupmap.closed_r_even(25, r0, s), direct[50], atol=1e-10)


def test_simplified_k0_and_k1(rng):
    for _ in range(20):
        q, p, r0 = rand(rng), rand(rng), rand(rng)
        np.testing.assert_allclose(groupmap.simplified_solution(0, "even", q, p, r0=r0), r0, atol=1e-14)
        r1 = groupmap.initial_r1(q, p, r0)
        expect = product(q, r1, q, r0, inverse(q), inverse(r1), inverse(q))
        np.testing.assert_allclose(groupmap.simplified_solution(1, "even", q, p, r0=r0), expect, atol=1e-12)


def test_simplified_k100_both_parities(rng):
    q, p, r0 = rand(rng), rand(rng), rand(rng)
    r1 = groupmap.initial_r1(q, p, r0)
    direct = groupmap.iterate(r0, r1, QSequence.constant(q), 201)
    np.testing.assert_allclose(groupmap.simplified_solution(100, "even", q, p, r0=r0), direct[200], atol=1e-9)
    r1_t = product(inverse(q), r1, q)
    odd = groupmap.simplified_solution(100, "odd", q, p, r1_tilde=r1_t)
    np.testing.assert_allclose(odd, product(inverse(q), direct[201], q), atol=1e-9)


def test_simplified_rejects_bad_parity():
    with pytest.raises(InvalidParameterError):
        groupmap.simplified_solution(1, "both", IDENTITY, IDENTITY, r0=IDENTITY)
    with pytest.raises(InvalidParameterError):
        groupmap.simplified_solution(1, "odd", IDENTITY, IDENTITY)


def test_parameter_orbit():
    orbit = groupmap.parameter_orbit(np.stack([IDENTITY, IDENTITY]))
    np.testing.assert_array_equal(orbit.coords, 0.0)
    assert orbit.degenerate.all()
    c = groupmap.parameter_orbit(su2.exp_axis_angle([0, 0, 1], math.pi / 2)).coords
    np.testing.assert_allclose(c, [0, 0, math.pi / 4], atol=1e-15)


def test_parameter_orbit_round_trip(rng):
    qs = QSequence.constant(rand(rng))
    orbit = groupmap.iterate(rand(rng), rand(rng), qs, 40)
    c = groupmap.parameter_orbit(orbit).coords
    chi = 2 * np.linalg.norm(c, axis=-1)
    rebuilt = su2.exp_axis_angle(c / np.linalg.norm(c, axis=-1, keepdims=True), chi)
    sign = np.sign(np.sum(rebuilt * orbit, axis=-1))[:, None]
    np.testing.assert_allclose(sign * rebuilt, orbit, atol=1e-12)


def test_norm_control_over_a_million_steps(rng):
    # 1000 independent configurations advanced 1000 steps each, vectorised
    n = 1000
    q, r0, r1 = rand(rng, n), rand(rng, n), rand(rng, n)
    qs = QSequence.constant(q)
    state = MapState(1, r0, r1)
    worst = 0.0
    for _ in range(1000):
        state = groupmap.step(state, qs)
        worst = max(worst, float(np.max(su2.norm_error(state.r_curr))))
    assert worst <= 1e-12


def test_conjugacy_class_is_conserved(rng):
    # every R_N is conjugate to R_0 or R_1, so the scalar part alternates
    qs = QSequence.explicit(rand(rng, 40), minus_one=rand(rng))
    r0, r1 = rand(rng), rand(rng)
    orbit = groupmap.iterate(r0, r1, qs, 38)
    np.testing.assert_allclose(orbit[::2, 0], r0[0], atol=1e-12)
    np.testing.assert_allclose(orbit[1::2, 0], r1[0], atol=1e-12)
