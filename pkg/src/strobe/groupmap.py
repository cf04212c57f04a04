"""The invertible group map

    R_{N+1} = Q_N R_N Q_{N-1} R_{N-1} Q_{N-1}^-1 R_N^-1 Q_N^-1

together with its reduction to the pair of recursions

    S_{N+1} = Q_N S_N Q_{N-2}^-1,    R_{N+1} = S_{N+1} R_{N-1} S_{N+1}^-1

(where S_N = R_N Q_{N-1} R_{N-1} Q_{N-2}) and their closed-form solutions.

Elements are quaternion arrays from :mod:`strobe.su2`; leading batch axes
are carried through unchanged, so many independent orbits can be advanced
in lockstep.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import su2
from .errors import InvalidParameterError, OutOfRangeError
from .su2 import inverse, mul, product, renormalize


@dataclass(frozen=True, eq=False)
class QSequence:
    """Supplier of the elements ``Q_N`` for ``N >= -1``.

    Use the constructors :meth:`constant`, :meth:`alternating` and
    :meth:`explicit` rather than building one by hand.
    """

    kind: str
    elements: tuple
    minus_one: np.ndarray | None = None

    @classmethod
    def constant(cls, q):
        return cls("constant", (np.asarray(q, dtype=float),))

    @classmethod
    def alternating(cls, s, t):
        """``Q_N = s`` for even ``N`` and ``t`` for odd ``N`` (so ``Q_-1 = t``)."""
        return cls("alternating", (np.asarray(s, dtype=float), np.asarray(t, dtype=float)))

    @classmethod
    def explicit(cls, elements: Sequence, minus_one=None):
        """``elements[k]`` is ``Q_k``; ``Q_-1`` defaults to ``Q_0``."""
        elements = tuple(np.asarray(e, dtype=float) for e in elements)
        if not elements:
            raise InvalidParameterError("explicit Q-sequence needs at least Q_0")
        m1 = elements[0] if minus_one is None else np.asarray(minus_one, dtype=float)
        return cls("explicit", elements, m1)

    def __getitem__(self, n: int) -> np.ndarray:
        n = int(n)
        if n < -1:
            raise OutOfRangeError(f"Q-sequence index {n} < -1")
        if self.kind == "constant":
            return self.elements[0]
        if self.kind == "alternating":
            return self.elements[n % 2]
        if n == -1:
            return self.minus_one
        if n >= len(self.elements):
            raise OutOfRangeError(f"explicit Q-sequence defines Q_-1..Q_{len(self.elements) - 1}, asked for Q_{n}")
        return self.elements[n]

    @property
    def last_index(self) -> float:
        if self.kind == "explicit":
            return len(self.elements) - 1
        return float("inf")


class MapState(NamedTuple):
    """``r_curr`` is ``R_N`` and ``r_prev`` is ``R_{N-1}``."""

    n: int
    r_prev: np.ndarray
    r_curr: np.ndarray


class SRecord(NamedTuple):
    n: int
    s: np.ndarray


def step(state: MapState, qs: QSequence, renorm: bool = True) -> MapState:
    n, r_prev, r_curr = state
    a = product(qs[n], r_curr, qs[n - 1])
    r_next = mul(mul(a, r_prev), inverse(a))
    if renorm:
        r_next = renormalize(r_next)
    return MapState(n + 1, r_curr, r_next)


def step_back(state: MapState, qs: QSequence, renorm: bool = True) -> MapState:
    """Exact inverse of :func:`step`: recovers ``R_{N-2}`` from ``R_{N-1}, R_N``."""
    n, r_prev, r_curr = state
    a = product(qs[n - 1], r_prev, qs[n - 2])
    r_back = mul(mul(inverse(a), r_curr), a)
    if renorm:
        r_back = renormalize(r_back)
    return MapState(n - 1, r_back, r_prev)


def iterate(r0, r1, qs: QSequence, n_max: int) -> np.ndarray:
    """Direct orbit ``R_0 .. R_{n_max}`` stacked along axis 0."""
    r0 = np.asarray(r0, dtype=float)
    out = np.empty((n_max + 1,) + r0.shape)
    out[0] = r0
    if n_max == 0:
        return out
    state = MapState(1, r0, np.asarray(r1, dtype=float))
    out[1] = state.r_curr
    for n in range(2, n_max + 1):
        state = step(state, qs)
        out[n] = state.r_curr
    return out


def s_of(r_n, r_prev, qs: QSequence, n: int) -> SRecord:
    """``S_N = R_N Q_{N-1} R_{N-1} Q_{N-2}``."""
    if n < 1:
        raise OutOfRangeError(f"S_N is defined for N >= 1, got {n}")
    return SRecord(n, product(r_n, qs[n - 1], r_prev, qs[n - 2]))


def rs_step(r_prev, s_n, qs: QSequence, n: int):
    """Advance the reduced system: ``(R_{N-1}, S_N) -> (R_{N+1}, S_{N+1})``."""
    s_next = product(qs[n], s_n, inverse(qs[n - 2]))
    r_next = product(s_next, r_prev, inverse(s_next))
    return r_next, s_next


def rs_orbit(r0, r1, qs: QSequence, n_max: int):
    """Orbit of the reduced system.

    Returns ``(R, S)`` where ``R[k] = R_k`` for ``k <= n_max`` and
    ``S[k] = S_k`` for ``1 <= k <= n_max`` (``S[0]`` is unused and NaN).
    """
    r0 = np.asarray(r0, dtype=float)
    r1 = np.asarray(r1, dtype=float)
    rs = np.empty((n_max + 1,) + r0.shape)
    ss = np.full((n_max + 1,) + r0.shape, np.nan)
    rs[0] = r0
    if n_max == 0:
        return rs, ss
    rs[1] = r1
    ss[1] = s_of(r1, r0, qs, 1).s
    for n in range(1, n_max):
        r_next, s_next = rs_step(rs[n - 1], ss[n], qs, n)
        rs[n + 1] = renormalize(r_next)
        ss[n + 1] = renormalize(s_next)
    return rs, ss


def closed_s(n: int, s1, qs: QSequence) -> np.ndarray:
    """``S_N = Q_{N-1} ... Q_1 S_1 Q_{-1}^-1 ... Q_{N-3}^-1`` for ``N >= 2``."""
    if n < 2:
        raise OutOfRangeError(f"closed form for S_N needs N >= 2, got {n}")
    if n - 1 > qs.last_index:
        raise OutOfRangeError(f"closed form for S_{n} needs Q_{n - 1}")
    left = product(*(qs[k] for k in range(n - 1, 0, -1)))
    right = product(*(inverse(qs[k]) for k in range(-1, n - 2)))
    return product(left, s1, right)


def closed_r_even(k: int, r0, s_by_index) -> np.ndarray:
    """``R_{2K} = S_{2K} S_{2K-2} ... S_2 R_0 S_2^-1 ... S_{2K}^-1``.

    ``s_by_index`` maps an index ``N`` to ``S_N`` (a dict, or an array
    indexed by ``N`` such as the second output of :func:`rs_orbit`).
    """
    if k < 1:
        raise OutOfRangeError(f"K must be >= 1, got {k}")
    try:
        ss = [np.asarray(s_by_index[2 * j], dtype=float) for j in range(k, 0, -1)]
    except (KeyError, IndexError) as exc:
        raise OutOfRangeError(f"missing S entry for R_{2 * k}: {exc}") from None
    conj = product(*ss)
    return product(conj, r0, inverse(conj))


def initial_r1(q, p, r0):
    """``R_1 = Q P R_0^-1 Q^-1`` for the constant-Q map."""
    return product(q, p, inverse(r0), inverse(q))


def p_of(q, r0, r1):
    """``P = Q^-1 R_1 Q R_0``."""
    return product(inverse(q), r1, q, r0)


def simplified_solution(k: int, parity: str, q, p, r0=None, r1_tilde=None) -> np.ndarray:
    """Closed form of the constant-Q map.

    ``parity="even"`` gives ``R_{2K} = Q^{2K} P^K R_0 P^-K Q^-2K``.
    ``parity="odd"`` gives ``Q^-1 R_{2K+1} Q = Q^{2K} P^K R~_1 P^-K Q^-2K``
    with ``R~_1 = Q^-1 R_1 Q``.
    """
    if parity == "even":
        base = r0
    elif parity == "odd":
        base = r1_tilde
    else:
        raise InvalidParameterError(f"parity must be 'even' or 'odd', got {parity!r}")
    if base is None:
        raise InvalidParameterError(f"{parity} parity needs its initial element")
    conj = mul(su2.power(q, 2 * k), su2.power(p, k))
    return product(conj, base, inverse(conj))


class ParameterOrbit(NamedTuple):
    coords: np.ndarray
    degenerate: np.ndarray


def parameter_orbit(elements) -> ParameterOrbit:
    """Lie-algebra coordinates ``c = (chi/2) r`` along an orbit of elements."""
    elements = np.asarray(elements, dtype=float)
    res = su2.axis_angle_of(elements)
    coords = 0.5 * np.asarray(res.angle)[..., None] * res.axis
    return ParameterOrbit(coords, np.asarray(res.degenerate))
