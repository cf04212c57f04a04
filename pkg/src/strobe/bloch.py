"""Bloch equation driven by the rotating field of the constant-Q map.

    dr/dtheta = 2 r x u(theta),   u(theta) = q + lam p(theta),
    p(theta)  = Rot_q(2 theta) p.

In time ``t = theta / omega`` the field becomes ``omega u(omega t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import sphere
from .errors import IntegrationError, InvalidParameterError
from .sphere import SphereConfig, Trajectory
from .su2 import as_unit_vector, rotate_vector

DEFAULT_STEP = 1e-4


@dataclass(frozen=True, eq=False)
class DriveField:
    p: np.ndarray
    q: np.ndarray
    lam: float
    omega: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "p", as_unit_vector(self.p, "p"))
        object.__setattr__(self, "q", as_unit_vector(self.q, "q"))
        if not self.omega > 0:
            raise InvalidParameterError(f"omega must be positive, got {self.omega}")

    @classmethod
    def from_config(cls, cfg: SphereConfig):
        return cls(cfg.p, cfg.q, cfg.lam, cfg.omega)


def p_of_theta(fld: DriveField, theta):
    return rotate_vector(fld.p, fld.q, 2.0 * np.asarray(theta, dtype=float))


def u_of_theta(fld: DriveField, theta):
    return fld.q + fld.lam * p_of_theta(fld, theta)


def u_of_t(fld: DriveField, t):
    """Time-domain drive ``omega u(omega t)``."""
    return fld.omega * u_of_theta(fld, fld.omega * np.asarray(t, dtype=float))


def vector_field(fld: DriveField, theta, r):
    """``2 r x u(theta)``."""
    return 2.0 * np.cross(np.asarray(r, dtype=float), u_of_theta(fld, theta))


@dataclass
class Diagnostics:
    """Running monitors collected while integrating."""

    evaluations: int = 0
    max_transversality: float = 0.0
    max_norm_drift: float = 0.0
    steps: int = 0
    extra: dict = field(default_factory=dict)


def _kernel(fld: DriveField, time_scale: float):
    """Scalar right-hand side ``f(s, r)`` and a monitor for RK4.

    ``s`` is the integration variable; the field is evaluated at
    ``theta = time_scale * s`` and scaled by ``time_scale``.
    """
    px, py, pz = (float(c) for c in fld.p)
    qx, qy, qz = (float(c) for c in fld.q)
    # p x q and (q.p) q for the rotating drive
    cx, cy, cz = py * qz - pz * qy, pz * qx - px * qz, px * qy - py * qx
    qp = px * qx + py * qy + pz * qz
    lam = float(fld.lam)
    w = float(time_scale)
    cos, sin = math.cos, math.sin

    def rhs(s, rx, ry, rz, diag):
        ang = 2.0 * w * s
        c, sn = cos(ang), sin(ang)
        k = (1.0 - c) * qp
        ux = w * (qx + lam * (c * px + sn * cx + k * qx))
        uy = w * (qy + lam * (c * py + sn * cy + k * qy))
        uz = w * (qz + lam * (c * pz + sn * cz + k * qz))
        fx = 2.0 * (ry * uz - rz * uy)
        fy = 2.0 * (rz * ux - rx * uz)
        fz = 2.0 * (rx * uy - ry * ux)
        if diag is not None:
            diag.evaluations += 1
            scale = (ux * ux + uy * uy + uz * uz) * math.sqrt(rx * rx + ry * ry + rz * rz)
            tr = abs(ux * fx + uy * fy + uz * fz) / scale if scale > 0 else 0.0
            if tr > diag.max_transversality:
                diag.max_transversality = tr
        return fx, fy, fz

    return rhs


def _advance(rhs, s0, state, s1, h, renorm, diag, monitor):
    """Fixed-step RK4 from ``s0`` to ``s1`` using ``ceil((s1 - s0)/h)`` equal steps."""
    span = s1 - s0
    if span == 0:
        return state
    n = max(1, math.ceil(abs(span) / h - 1e-9))
    dh = span / n
    rx, ry, rz = state
    mon = diag if monitor else None
    for i in range(n):
        s = s0 + i * dh
        k1 = rhs(s, rx, ry, rz, mon)
        hh = 0.5 * dh
        k2 = rhs(s + hh, rx + hh * k1[0], ry + hh * k1[1], rz + hh * k1[2], mon)
        k3 = rhs(s + hh, rx + hh * k2[0], ry + hh * k2[1], rz + hh * k2[2], mon)
        k4 = rhs(s + dh, rx + dh * k3[0], ry + dh * k3[1], rz + dh * k3[2], mon)
        d6 = dh / 6.0
        rx += d6 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        ry += d6 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        rz += d6 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        nrm = math.sqrt(rx * rx + ry * ry + rz * rz)
        if not math.isfinite(nrm):
            raise IntegrationError("non-finite ODE state", s)
        drift = abs(nrm - 1.0)
        if drift > diag.max_norm_drift:
            diag.max_norm_drift = drift
        if renorm:
            rx, ry, rz = rx / nrm, ry / nrm, rz / nrm
    diag.steps += n
    return rx, ry, rz


def _integrate(fld, r0, grid, h, renormalize, monitor, time_scale):
    if not h > 0:
        raise InvalidParameterError(f"step must be positive, got {h}")
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if not np.all(np.isfinite(grid)):
        raise InvalidParameterError("output grid must be finite")
    rhs = _kernel(fld, time_scale)
    diag = Diagnostics()
    out = np.empty((len(grid), 3))
    state = tuple(float(c) for c in np.asarray(r0, dtype=float))
    s = 0.0
    for i, s_next in enumerate(grid):
        state = _advance(rhs, s, state, float(s_next), h, renormalize, diag, monitor)
        s = float(s_next)
        out[i] = state
    return out, diag


def integrate(fld: DriveField, r0, theta, h=DEFAULT_STEP, renormalize=True, monitor=False, cfg=None) -> Trajectory:
    """Classical RK4 for ``dr/dtheta = 2 r x u(theta)`` from ``theta = 0``.

    The solution is reported at each value of ``theta`` (increasing or
    decreasing, starting from 0). Between consecutive output points the
    integrator takes equal steps no longer than ``h``. With ``renormalize``
    on, ``r`` is projected back to the unit sphere after every step; the
    unprojected drift is recorded either way in ``info["diagnostics"]``.
    ``monitor=True`` also records the largest relative ``|u . dr/dtheta|``
    seen at any field evaluation.
    """
    r, diag = _integrate(fld, r0, theta, h, renormalize, monitor, 1.0)
    grid = np.asarray(theta, dtype=float).reshape(-1)
    return Trajectory.from_points(np.arange(len(grid)), grid, r, fld.q, "ode", cfg, diagnostics=diag)


def integrate_time(fld: DriveField, r0, t, h, renormalize=True) -> Trajectory:
    """RK4 in physical time for ``dr/dt = 2 r x omega u(omega t)``.

    The ``theta`` column of the result holds ``omega t``.
    """
    r, diag = _integrate(fld, r0, t, h, renormalize, False, fld.omega)
    t = np.asarray(t, dtype=float).reshape(-1)
    return Trajectory.from_points(np.arange(len(t)), fld.omega * t, r, fld.q, "ode", None, diagnostics=diag, time=t)


@dataclass
class StrobeReport:
    sup_deviation: float
    k_max: int
    h: float
    tolerance: float
    max_norm_drift: float

    @property
    def passed(self) -> bool:
        return self.sup_deviation <= self.tolerance

    def as_dict(self):
        return {
            "sup_deviation": self.sup_deviation,
            "k_max": self.k_max,
            "h": self.h,
            "tolerance": self.tolerance,
            "max_norm_drift": self.max_norm_drift,
            "pass": self.passed,
        }


def strobe_tolerance(h: float) -> float:
    """1e-8 at the default step, scaled as ``h**4``, never below 1e-10."""
    return max(1e-10, 1e-8 * (h / DEFAULT_STEP) ** 4)


def strobe_check(cfg: SphereConfig, k_max: int, h=DEFAULT_STEP, fld: DriveField | None = None, tolerance=None) -> StrobeReport:
    """Compare map samples ``r_strobe(K)`` with the integrated flow at ``theta = K alpha``."""
    alpha = cfg.require_strobe()
    fld = DriveField.from_config(cfg) if fld is None else fld
    if not (np.allclose(fld.p, cfg.p) and np.allclose(fld.q, cfg.q) and fld.lam == cfg.lam):
        raise InvalidParameterError("drive field and config disagree on p, q or lambda")
    k = np.arange(k_max + 1)
    theta = k * alpha
    flow = integrate(fld, cfg.r0, theta, h, cfg=cfg)
    dev = float(np.max(np.linalg.norm(flow.r - sphere.r_curve(cfg, theta), axis=-1)))
    tol = strobe_tolerance(h) if tolerance is None else tolerance
    return StrobeReport(dev, int(k_max), h, tol, flow.info["diagnostics"].max_norm_drift)


def convergence_study(cfg: SphereConfig, theta_end: float, counts=(100, 200, 400), renormalize=False):
    """Global RK4 error at ``theta_end`` for each number of equal steps.

    Returns ``(steps, errors, orders)``; ``orders[i]`` is the observed
    convergence order between consecutive step sizes.
    """
    exact = sphere.r_curve(cfg, theta_end)
    fld = DriveField.from_config(cfg)
    steps = [theta_end / n for n in counts]
    errors = []
    for h in steps:
        traj = integrate(fld, cfg.r0, [theta_end], h, renormalize=renormalize)
        errors.append(float(np.linalg.norm(traj.r[-1] - exact)))
    orders = [
        math.log(errors[i] / errors[i + 1]) / math.log(steps[i] / steps[i + 1]) for i in range(len(steps) - 1)
    ]
    return steps, errors, orders
