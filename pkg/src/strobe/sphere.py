"""Constant-Q map seen as motion of a unit vector on the sphere.

With ``Q = exp(i alpha/2 sigma.q)`` and ``P = exp(i beta/2 sigma.p)`` the
even iterates of the map satisfy ``R_{2K} = Q^{2K} P^K R_0 P^-K Q^-2K``.
Their axes therefore follow

    r_{2K} = Rot_q(2 K alpha) Rot_p(K beta) r_0,

where ``Rot_s(gamma)`` is :func:`strobe.su2.rotate_vector`. Writing
``theta = K alpha`` and ``lam = beta / (2 alpha)`` turns this into the curve
``r(theta) = Rot_q(2 theta) t(theta)`` with ``t(theta) = Rot_p(2 lam theta) r_0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import NamedTuple

import numpy as np
import sympy

from . import groupmap, su2
from .errors import InvalidParameterError, UnsupportedInputError
from .su2 import as_unit_vector, rotate_vector

DEFAULT_P = np.array([1.0, 0.0, 0.0])
DEFAULT_Q = np.array([0.0, 0.0, 1.0])
DEFAULT_R0 = np.array([0.6, 0.0, 0.8])
DEFAULT_CHI0 = math.pi / 2
LAMBDA_TOL = 1e-12


def _is_exact(x):
    return isinstance(x, (int, Fraction, str, sympy.Basic)) and not isinstance(x, bool)


def _to_float(x):
    if isinstance(x, str):
        return float(Fraction(x))
    return float(x)


@dataclass(frozen=True, eq=False)
class SphereConfig:
    """Parameters of one experiment. Angles are radians.

    ``alpha`` and ``beta`` may be ``None`` for curve-only work, in which case
    ``lam`` alone drives the curve. ``exact_alpha_deg``, ``exact_beta_deg``
    and ``exact_lam`` keep exact values (``Fraction`` or sympy expressions)
    when the caller supplied them; :func:`closure_index` reads these.
    """

    lam: float
    alpha: float | None = None
    beta: float | None = None
    p: np.ndarray = field(default_factory=DEFAULT_P.copy)
    q: np.ndarray = field(default_factory=DEFAULT_Q.copy)
    r0: np.ndarray = field(default_factory=DEFAULT_R0.copy)
    chi0: float = DEFAULT_CHI0
    omega: float = 1.0
    exact_alpha_deg: object = None
    exact_beta_deg: object = None
    exact_lam: object = None

    def __post_init__(self):
        for name in ("p", "q", "r0"):
            object.__setattr__(self, name, as_unit_vector(getattr(self, name), name))
        chi = math.fmod(self.chi0, 2 * math.pi)
        if min(abs(chi), 2 * math.pi - abs(chi)) < 1e-12:
            raise InvalidParameterError("chi0 must be nonzero modulo 2 pi")
        if not self.omega > 0:
            raise InvalidParameterError(f"omega must be positive, got {self.omega}")
        if self.alpha is not None and self.beta is not None:
            if self.alpha == 0:
                raise InvalidParameterError("alpha must be nonzero")
            implied = self.beta / (2 * self.alpha)
            if abs(implied - self.lam) > LAMBDA_TOL * max(1.0, abs(self.lam)):
                raise InvalidParameterError(f"lambda {self.lam} != beta/(2 alpha) = {implied}")

    @classmethod
    def build(cls, alpha=None, beta=None, lam=None, *, degrees=False, **kwargs):
        """Complete a config from any two of ``alpha``, ``beta``, ``lam``.

        With ``degrees=True`` the angles are read in degrees; exact inputs
        (``int``, ``Fraction``, decimal strings, sympy numbers) are kept as
        exact annotations alongside the float radians.
        """
        exact = {}
        if degrees:
            if alpha is not None and _is_exact(alpha):
                exact["exact_alpha_deg"] = _exact_number(alpha)
            if beta is not None and _is_exact(beta):
                exact["exact_beta_deg"] = _exact_number(beta)
        if lam is not None and _is_exact(lam):
            exact["exact_lam"] = _exact_number(lam)
        scale = math.pi / 180 if degrees else 1.0
        a = None if alpha is None else _to_float(alpha) * scale
        b = None if beta is None else _to_float(beta) * scale
        lam_f = None if lam is None else _to_float(lam)
        if lam_f is None:
            if a is None or b is None:
                raise InvalidParameterError("need lam, or both alpha and beta")
            if a == 0:
                raise InvalidParameterError("alpha must be nonzero")
            lam_f = b / (2 * a)
            if "exact_alpha_deg" in exact and "exact_beta_deg" in exact:
                exact["exact_lam"] = exact["exact_beta_deg"] / (2 * exact["exact_alpha_deg"])
        elif b is None and a is not None:
            b = 2 * a * lam_f
            if "exact_alpha_deg" in exact and "exact_lam" in exact:
                exact["exact_beta_deg"] = 2 * exact["exact_alpha_deg"] * exact["exact_lam"]
        return cls(lam=lam_f, alpha=a, beta=b, **exact, **kwargs)

    def with_(self, **changes):
        return replace(self, **changes)

    @property
    def has_strobe(self) -> bool:
        return self.alpha is not None

    def require_strobe(self):
        if self.alpha is None:
            raise InvalidParameterError("this operation needs the strobe angle alpha")
        return self.alpha


def _exact_number(x):
    if isinstance(x, str):
        return sympy.Rational(x)
    if isinstance(x, Fraction):
        return sympy.Rational(x.numerator, x.denominator)
    return sympy.sympify(x)


class Bounds(NamedTuple):
    a: float
    b: float
    c: float
    lower: float
    upper: float


@dataclass(eq=False)
class Trajectory:
    """Ordered samples ``(index, theta, r, r.q)`` plus provenance."""

    index: np.ndarray
    theta: np.ndarray
    r: np.ndarray
    r_dot_q: np.ndarray
    method: str
    config: SphereConfig | None = None
    info: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.index)

    @classmethod
    def from_points(cls, index, theta, r, q, method, config=None, **info):
        r = np.asarray(r, dtype=float).reshape(-1, 3)
        return cls(
            index=np.asarray(index, dtype=np.int64).reshape(-1),
            theta=np.asarray(theta, dtype=float).reshape(-1),
            r=r,
            r_dot_q=r @ np.asarray(q, dtype=float),
            method=method,
            config=config,
            info=dict(info),
        )

    @classmethod
    def empty(cls, method="empty", config=None):
        return cls(np.zeros(0, np.int64), np.zeros(0), np.zeros((0, 3)), np.zeros(0), method, config)

    def head(self, n):
        return Trajectory(self.index[:n], self.theta[:n], self.r[:n], self.r_dot_q[:n], self.method, self.config, dict(self.info))


def t_curve(cfg: SphereConfig, theta):
    """Inner curve ``t(theta) = Rot_p(2 lam theta) r0``."""
    theta = np.asarray(theta, dtype=float)
    return rotate_vector(cfg.r0, cfg.p, 2.0 * cfg.lam * theta)


def r_curve(cfg: SphereConfig, theta):
    """``r(theta) = Rot_q(2 theta) t(theta)``; broadcasts over ``theta``."""
    theta = np.asarray(theta, dtype=float)
    return rotate_vector(t_curve(cfg, theta), cfg.q, 2.0 * theta)


def r_strobe(cfg: SphereConfig, k):
    """Axis of ``R_{2K}``, i.e. ``r_curve`` at ``theta = K alpha``."""
    alpha = cfg.require_strobe()
    return r_curve(cfg, np.asarray(k, dtype=float) * alpha)


def strobe_trajectory(cfg: SphereConfig, k_count: int, start: int = 0) -> Trajectory:
    k = np.arange(start, start + k_count)
    theta = k * cfg.require_strobe()
    return Trajectory.from_points(k, theta, r_curve(cfg, theta), cfg.q, "closed-form", cfg)


def curve_trajectory(cfg: SphereConfig, theta) -> Trajectory:
    theta = np.asarray(theta, dtype=float).reshape(-1)
    return Trajectory.from_points(np.arange(len(theta)), theta, r_curve(cfg, theta), cfg.q, "closed-form", cfg)


def map_elements(alpha, beta, p, q, r0, chi0):
    """``(Q, P, R_0, R_1)`` for the constant-Q map; broadcasts over batches."""
    qe = su2.exp_axis_angle(q, alpha)
    pe = su2.exp_axis_angle(p, beta)
    r0e = su2.exp_axis_angle(r0, chi0)
    return qe, pe, r0e, groupmap.initial_r1(qe, pe, r0e)


def direct_strobe_axes(alpha, beta, p, q, r0, chi0, k_max: int) -> np.ndarray:
    """Axes of ``R_0, R_2, ..., R_{2 k_max}`` by iterating the group map.

    Every argument broadcasts, so a batch of configurations runs in lockstep.
    Returns an array of shape ``(k_max + 1, ..., 3)``.
    """
    qe, pe, r0e, r1e = map_elements(alpha, beta, p, q, r0, chi0)
    shape = np.broadcast_shapes(qe.shape, pe.shape, r0e.shape)
    qe, r0e, r1e = (np.broadcast_to(x, shape) for x in (qe, r0e, r1e))
    orbit = groupmap.iterate(r0e, r1e, groupmap.QSequence.constant(qe), 2 * k_max)
    return su2.axis_angle_of(orbit[::2]).axis


def direct_trajectory(cfg: SphereConfig, k_count: int) -> Trajectory:
    alpha = cfg.require_strobe()
    axes = direct_strobe_axes(alpha, cfg.beta, cfg.p, cfg.q, cfg.r0, cfg.chi0, max(k_count - 1, 0))
    k = np.arange(k_count)
    return Trajectory.from_points(k, k * alpha, axes[:k_count], cfg.q, "direct", cfg)


def bounds_of(p, q, r0) -> Bounds:
    p, q, r0 = (np.asarray(v, dtype=float) for v in (p, q, r0))
    a = float(r0 @ q)
    b = float(np.cross(r0, p) @ q)
    c = float((p @ r0) * (p @ q))
    half = math.sqrt(b * b + (a - c) ** 2)
    return Bounds(a, b, c, max(-1.0, c - half), min(1.0, c + half))


def bounds(cfg: SphereConfig) -> Bounds:
    """Parallels ``A1 <= r.q <= A2`` that confine the motion."""
    return bounds_of(cfg.p, cfg.q, cfg.r0)


def axial_observable(traj: Trajectory, q=None) -> np.ndarray:
    q = traj.config.q if q is None else np.asarray(q, dtype=float)
    return traj.r @ q


class Closure(NamedTuple):
    k: int
    m: int
    n: int


_IRRATIONAL = object()


def _turns(x, unit):
    """Express an exact angle as a fraction of a full turn."""
    if isinstance(x, bool) or isinstance(x, (float, np.floating)):
        raise UnsupportedInputError(
            f"closure needs exact angles, got float {x!r}; use distinct_point_count for float input"
        )
    if isinstance(x, str):
        x = sympy.Rational(x)
    elif isinstance(x, Fraction):
        x = sympy.Rational(x.numerator, x.denominator)
    elif isinstance(x, int):
        x = sympy.Integer(x)
    elif not isinstance(x, sympy.Basic):
        raise UnsupportedInputError(f"unsupported exact angle type {type(x).__name__}")
    full = {"deg": sympy.Integer(360), "turn": sympy.Integer(1), "rad": 2 * sympy.pi}[unit]
    return _rational_or_flag(sympy.simplify(x / full))


def _rational_or_flag(x):
    if x.is_rational:
        return Fraction(int(sympy.numer(x)), int(sympy.denom(x)))
    if x.is_rational is False or (x.is_number and x.is_irrational):
        return _IRRATIONAL
    raise UnsupportedInputError(f"cannot decide whether {x} is rational")


def closure_index(alpha, beta=None, *, lam=None, unit="deg") -> Closure | None:
    """Smallest ``K >= 1`` with ``K beta = 2 m pi`` and ``2 K alpha = 2 n pi``.

    ``alpha`` is either a :class:`SphereConfig` carrying exact annotations,
    or an exact angle (``int``, ``Fraction``, decimal string or sympy
    expression) in ``unit`` (``"deg"``, ``"rad"`` or ``"turn"``). Supply
    ``beta`` or ``lam``. Returns ``None`` when no finite ``K`` exists.
    Float input raises :class:`UnsupportedInputError`.
    """
    if isinstance(alpha, SphereConfig):
        cfg = alpha
        if cfg.exact_alpha_deg is None or (cfg.exact_beta_deg is None and cfg.exact_lam is None):
            raise UnsupportedInputError("config carries no exact angles")
        if cfg.exact_beta_deg is not None:
            return closure_index(cfg.exact_alpha_deg, cfg.exact_beta_deg, unit="deg")
        return closure_index(cfg.exact_alpha_deg, lam=cfg.exact_lam, unit="deg")

    a = _turns(alpha, unit)
    if beta is not None:
        b = _turns(beta, unit)
    elif lam is not None:
        if isinstance(lam, (float, np.floating)):
            raise UnsupportedInputError(f"closure needs an exact lambda, got float {lam!r}")
        lam_t = _turns(lam, "turn")
        if a is _IRRATIONAL or lam_t is _IRRATIONAL:
            b = _IRRATIONAL if a != 0 else Fraction(0)
        else:
            b = 2 * a * lam_t
    else:
        raise InvalidParameterError("closure_index needs beta or lam")

    if a is _IRRATIONAL or b is _IRRATIONAL:
        return None
    two_a = 2 * a
    k = math.lcm(b.denominator, two_a.denominator)
    return Closure(k, int(k * b), int(k * two_a))


def great_circle_distance(a, b):
    """Angle between unit vectors, accurate for tiny separations."""
    chord = np.linalg.norm(np.asarray(a) - np.asarray(b), axis=-1)
    return 2.0 * np.arcsin(np.clip(chord / 2.0, 0.0, 1.0))


def distinct_points(points, tol=1e-9) -> np.ndarray:
    """Indices of first-seen representatives of ``tol``-distinct points."""
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    reps: list[int] = []
    for i, x in enumerate(points):
        if not reps or np.all(great_circle_distance(points[reps], x) > tol):
            reps.append(i)
    return np.array(reps, dtype=np.int64)


def distinct_point_count(cfg: SphereConfig, k_max: int, tol: float = 1e-9) -> int:
    """Number of ``tol``-distinct points among ``r_strobe(K)``, ``0 <= K < k_max``."""
    return len(distinct_points(r_strobe(cfg, np.arange(k_max)), tol))


def reduced_ratio(lam) -> Fraction:
    if isinstance(lam, tuple):
        lam = Fraction(*lam)
    if isinstance(lam, sympy.Basic):
        lam = _rational_or_flag(lam)
        if lam is _IRRATIONAL:
            raise UnsupportedInputError("symmetry order needs a rational lambda")
    if isinstance(lam, (float, np.floating)):
        raise UnsupportedInputError("symmetry order needs an exact rational lambda")
    return Fraction(lam)


def symmetry_order(lam) -> int:
    """``m`` for ``lam = m/n`` in lowest terms (fold order about ``q``)."""
    frac = reduced_ratio(lam)
    if frac <= 0:
        raise InvalidParameterError(f"symmetry order needs lam > 0, got {frac}")
    return frac.numerator


def symmetry_shift(lam):
    """``(dtheta, angle)`` with ``r(theta + dtheta) = Rot_q(angle) r(theta)``."""
    frac = reduced_ratio(lam)
    m, n = frac.numerator, frac.denominator
    return math.pi * n / m, 2 * math.pi * n / m


def apply_symmetry(traj: Trajectory, kappa: float, q=None, alpha=None) -> Trajectory:
    """Image of ``traj`` under ``R -> Q^kappa R Q^-kappa``.

    Conjugation by ``Q^kappa = exp(i kappa alpha/2 sigma.q)`` turns every
    sample about ``q`` by ``kappa alpha``.
    """
    cfg = traj.config
    q = cfg.q if q is None else q
    alpha = cfg.require_strobe() if alpha is None else alpha
    r = rotate_vector(traj.r, q, kappa * alpha)
    return Trajectory.from_points(traj.index, traj.theta, r, q, traj.method, cfg, **traj.info)


def perpendicular_basis(q):
    q = as_unit_vector(q, "q")
    trial = np.eye(3)[np.argmin(np.abs(q))]
    e1 = trial - (trial @ q) * q
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(q, e1)


def band_coverage(r, q, lower, upper, n_lon=12, n_lat=3) -> np.ndarray:
    """Visit counts on a longitude x latitude grid over the band ``[lower, upper]``.

    Longitude is measured about ``q``; the band is split into ``n_lat``
    equal slices of ``r.q``. Samples outside the band are ignored.
    """
    r = np.asarray(r, dtype=float).reshape(-1, 3)
    q = np.asarray(q, dtype=float)
    e1, e2 = perpendicular_basis(q)
    lon = np.mod(np.arctan2(r @ e2, r @ e1), 2 * math.pi)
    z = r @ q
    inside = (z >= lower) & (z <= upper)
    i = np.minimum((lon / (2 * math.pi) * n_lon).astype(int), n_lon - 1)
    j = np.minimum(((z - lower) / (upper - lower) * n_lat).astype(int), n_lat - 1)
    counts = np.zeros((n_lon, n_lat), dtype=np.int64)
    np.add.at(counts, (i[inside], j[inside]), 1)
    return counts
