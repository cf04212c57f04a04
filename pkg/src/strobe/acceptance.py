"""End-to-end checks binding the figure experiments to numbers.

Each check returns a :class:`Criterion`. :func:`run_all` executes the whole
suite; :func:`write_report` stores it as JSON next to a CSV summary and a
convergence plot.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import bloch, groupmap, io, presets, sphere, su2
from .groupmap import QSequence

SEED = 20240501


@dataclass
class Criterion:
    criterion_id: str
    description: str
    measured: object
    expected: object
    tolerance: object
    passed: bool
    runtime_limit: float
    runtime: float = 0.0
    details: dict = field(default_factory=dict)

    def record(self) -> dict:
        rec = {
            "criterion_id": self.criterion_id,
            "description": self.description,
            "measured": self.measured,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "pass": bool(self.passed),
        }
        if self.details:
            rec["details"] = self.details
        return rec

    @property
    def within_runtime(self) -> bool:
        return self.runtime < self.runtime_limit

    def line(self) -> str:
        status = "PASS" if self.passed and self.within_runtime else "FAIL"
        return (
            f"[{status}] {self.criterion_id}: {self.description} | measured={self.measured} "
            f"expected={self.expected} tol={self.tolerance} | {self.runtime:.3f}s (limit {self.runtime_limit}s)"
        )


ERRATA = [
    "even-index closed form telescopes over S_{2K} S_{2K-2} ... S_2 (consecutive-index product does not reproduce the map)",
    "odd-index closed form conjugates with P^K on the left and P^-K on the right",
    "stroboscopic samples use rotation angles 2 K alpha about q and K beta = 2 lam K alpha about p",
    "time-domain drive is omega u(omega t) with q coefficient 1 + lam (1 - cos 2 omega t)(q.p)",
    "S_N for constant Q telescopes to Q^(N-1) S_1 Q^-(N-1)",
]


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        crit = fn(*args, **kwargs)
        crit.runtime = time.perf_counter() - t0
        return crit

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _random_configs(rng, n):
    alpha = rng.uniform(0.05, 2 * math.pi - 0.05, n)
    beta = rng.uniform(0.05, 2 * math.pi - 0.05, n)
    p = su2.random_unit_vectors(rng, n)
    q = su2.random_unit_vectors(rng, n)
    r0 = su2.random_unit_vectors(rng, n)
    return alpha, beta, p, q, r0


def _closed_form_batch(alpha, beta, p, q, r0, k):
    """``Rot_q(2 K alpha) Rot_p(K beta) r0`` for a batch; shape ``(len(k), n, 3)``."""
    k = np.asarray(k, dtype=float)[:, None]
    t = np.stack([sphere.rotate_vector(r0[i], p[i], k[:, 0] * beta[i]) for i in range(len(alpha))], axis=1)
    return np.stack([sphere.rotate_vector(t[:, i], q[i], 2 * k[:, 0] * alpha[i]) for i in range(len(alpha))], axis=1)


@_timed
def bounds_reproduction():
    b = sphere.bounds_of([1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.6, 0.0, 0.8])
    err = max(abs(b.lower + 0.8), abs(b.upper - 0.8))
    crit = Criterion("C1", "parallels for p=[1,0,0], q=[0,0,1], r0=[0.6,0,0.8]", [b.lower, b.upper], [-0.8, 0.8], 1e-12, err <= 1e-12, 1e-3)
    crit.details = {"a": b.a, "b": b.b, "c": b.c}
    return crit


@_timed
def map_matches_closed_form(n_configs=100, k_max=1000):
    rng = np.random.default_rng(SEED)
    alpha, beta, p, q, r0 = _random_configs(rng, n_configs)
    k = np.arange(k_max + 1)
    expected = _closed_form_batch(alpha, beta, p, q, r0, k)
    worst = 0.0
    per_chi = {}
    for chi0 in (0.1, math.pi / 2, 3.0):
        axes = sphere.direct_strobe_axes(alpha, beta, p, q, r0, chi0, k_max)
        dev = float(np.max(np.linalg.norm(axes - expected, axis=-1)))
        per_chi[repr(chi0)] = dev
        worst = max(worst, dev)
    crit = Criterion(
        "C2",
        f"direct map vs closed form, {n_configs} configs, K <= {k_max}, chi0 in {{0.1, pi/2, 3}}",
        worst,
        0.0,
        1e-9,
        worst <= 1e-9,
        5.0,
    )
    crit.details = {"max_deviation_by_chi0": per_chi}
    return crit


@_timed
def flow_is_sampled(h=bloch.DEFAULT_STEP):
    reports = {}
    for name, cfg in (("fig1", presets.fig1().primary.config), ("fig2-dense", presets.fig2().layers[0].config)):
        k_max = int(math.floor(2 * math.pi / cfg.alpha))
        reports[name] = bloch.strobe_check(cfg, k_max, h, tolerance=1e-8).as_dict()
    worst = max(r["sup_deviation"] for r in reports.values())
    crit = Criterion("C3", "RK4 flow (h=1e-4) vs map samples over theta in [0, 2 pi], fig1 and fig2 dense", worst, 0.0, 1e-8, worst <= 1e-8, 10.0)
    crit.details = reports
    return crit


def _general_map_batches(rng, n, n_max):
    """Random initial data and Q-sequences, batched per sequence kind."""
    sizes = [n // 3 + (1 if i < n % 3 else 0) for i in range(3)]
    out = []
    for kind, b in zip(("constant", "alternating", "explicit"), sizes):
        if kind == "constant":
            qs = QSequence.constant(su2.random_elements(rng, b))
        elif kind == "alternating":
            qs = QSequence.alternating(su2.random_elements(rng, b), su2.random_elements(rng, b))
        else:
            qs = QSequence.explicit([su2.random_elements(rng, b) for _ in range(n_max + 2)])
        out.append((kind, qs, su2.random_elements(rng, b), su2.random_elements(rng, b)))
    return out


@_timed
def general_closed_forms(n_configs=100, n_max=40, depth=100):
    rng = np.random.default_rng(SEED + 1)
    s_err = r_err = trip_err = 0.0
    for kind, qs, r0, r1 in _general_map_batches(rng, n_configs, max(n_max, 2 * depth)):
        rs, ss = groupmap.rs_orbit(r0, r1, qs, n_max)
        direct = groupmap.iterate(r0, r1, qs, n_max)
        for n in range(2, n_max + 1):
            s_err = max(s_err, float(np.max(np.abs(groupmap.closed_s(n, ss[1], qs) - ss[n]))))
        for k in range(1, n_max // 2 + 1):
            closed = groupmap.closed_r_even(k, r0, ss)
            r_err = max(r_err, float(np.max(np.abs(closed - direct[2 * k]))), float(np.max(np.abs(closed - rs[2 * k]))))
        fwd = groupmap.MapState(1, r0, r1)
        for _ in range(depth):
            fwd = groupmap.step(fwd, qs)
        for _ in range(depth):
            fwd = groupmap.step_back(fwd, qs)
        trip_err = max(trip_err, float(np.max(np.abs(fwd.r_prev - r0))), float(np.max(np.abs(fwd.r_curr - r1))))
    ok = s_err <= 1e-12 and r_err <= 1e-10 and trip_err <= 1e-9
    return Criterion(
        "C4",
        f"closed S / closed even R vs recursions ({n_configs} configs: constant, alternating, explicit); {depth}-deep round trips",
        {"closed_s": s_err, "closed_r_even": r_err, "round_trip": trip_err},
        {"closed_s": 0.0, "closed_r_even": 0.0, "round_trip": 0.0},
        {"closed_s": 1e-12, "closed_r_even": 1e-10, "round_trip": 1e-9},
        ok,
        5.0,
    )


@_timed
def periodicity_arithmetic():
    measured = {}
    ok = True
    for label, (a, b), want in (("2deg/8deg", (2, 8), (90, 2, 1)), ("0.01deg/0.0205deg", ("0.01", "0.0205"), (720000, 41, 40))):
        cfg = sphere.SphereConfig.build(a, b, degrees=True)
        clo = sphere.closure_index(cfg)
        ret = float(np.linalg.norm(sphere.r_strobe(cfg, clo.k) - cfg.r0))
        measured[label] = {"K": clo.k, "m": clo.m, "n": clo.n, "return_error": ret}
        ok &= (clo.k, clo.m, clo.n) == want and ret <= 1e-9
    expected = {"2deg/8deg": {"K": 90, "m": 2, "n": 1}, "0.01deg/0.0205deg": {"K": 720000, "m": 41, "n": 40}}
    return Criterion("C5", "closure index and return to r0 at K*", measured, expected, 1e-9, ok, 2.0)


@_timed
def symmetry_orders(samples=1000):
    rng = np.random.default_rng(SEED + 2)
    theta = rng.uniform(0.0, 2 * math.pi, samples)
    measured = {}
    worst = 0.0
    orders = {}
    for lam in (Fraction(3), Fraction(2), Fraction(41, 40)):
        cfg = sphere.SphereConfig.build(lam=lam)
        shift, angle = sphere.symmetry_shift(lam)
        lhs = sphere.r_curve(cfg, theta + shift)
        rhs = sphere.rotate_vector(sphere.r_curve(cfg, theta), cfg.q, angle)
        dev = float(np.max(np.linalg.norm(lhs - rhs, axis=-1)))
        measured[str(lam)] = dev
        orders[str(lam)] = sphere.symmetry_order(lam)
        worst = max(worst, dev)
    ok = worst <= 1e-12 and orders == {"3": 3, "2": 2, "41/40": 41}
    crit = Criterion("C6", "r(theta + pi n/m) = Rot_q(2 pi n/m) r(theta) for lambda in {3, 2, 41/40}", measured, {"3": 0.0, "2": 0.0, "41/40": 0.0}, 1e-12, ok, 2.0)
    crit.details = {"fold_order": orders}
    return crit


def fig2_dot_analysis(tol=1e-9):
    cfg = presets.fig2().layers[1].config
    k_star = sphere.closure_index(cfg).k
    counts = [sphere.distinct_point_count(cfg, k_star, tol) for _ in range(2)]
    half = k_star // 2
    first = sphere.r_strobe(cfg, np.arange(half))
    second = sphere.r_strobe(cfg, np.arange(half, k_star))
    # second half-period is the first turned by the fold angle pi about q
    image = sphere.rotate_vector(first, cfg.q, math.pi)
    half_dev = float(np.max(np.linalg.norm(image - second, axis=-1)))
    return {
        "closure_K": k_star,
        "distinct_points_full_period": counts[0],
        "distinct_points_repeat": counts[1],
        "distinct_points_half_period": sphere.distinct_point_count(cfg, half, tol),
        "half_period_symmetry_deviation": half_dev,
        "claimed": 45,
    }


@_timed
def fig2_dot_count(tol=1e-9):
    a = fig2_dot_analysis(tol)
    reproducible = a["distinct_points_full_period"] == a["distinct_points_repeat"]
    agrees = a["distinct_points_full_period"] == a["claimed"]
    explained = a["distinct_points_half_period"] == a["claimed"] and a["half_period_symmetry_deviation"] <= tol
    if agrees:
        note = "measured count agrees with the claimed 45"
    elif explained:
        note = (
            f"one closure period (K = 0..{a['closure_K'] - 1}) gives {a['distinct_points_full_period']} distinct points; "
            f"the first half period alone gives {a['distinct_points_half_period']}, and the second half is its image under "
            "the two-fold rotation about q, so 45 counts a half period"
        )
    else:
        note = "discrepancy with the claimed 45 not explained by the half-period symmetry"
    crit = Criterion("C7", "fig2 distinct dot count over one closure period (tol 1e-9)", a["distinct_points_full_period"], 45, tol, reproducible and (agrees or explained), 1.0)
    crit.details = dict(a, analysis=note)
    return crit


@_timed
def conservation(h_off=1e-3):
    cfg = presets.fig1().primary.config
    fld = bloch.DriveField.from_config(cfg)
    k = np.arange(0, int(2 * math.pi / cfg.alpha), 20)
    closed = sphere.r_strobe(cfg, k)
    direct = sphere.direct_trajectory(presets.fig2().layers[1].config, 91).r
    flow = bloch.integrate(fld, cfg.r0, k * cfg.alpha, 1e-3, renormalize=True, monitor=True)
    diag = flow.info["diagnostics"]
    on_err = max(float(np.max(su2.norm_error(x))) for x in (closed, direct, flow.r))
    span = 2 * math.pi
    off = bloch.integrate(fld, cfg.r0, [span], h_off, renormalize=False)
    drift = float(abs(np.linalg.norm(off.r[-1]) - 1.0))
    c_const = (2 * (1 + abs(cfg.lam))) ** 5
    bound = c_const * h_off**4 * span
    transversality = diag.max_transversality
    ok = on_err <= 1e-12 and drift <= bound and transversality <= 1e-14
    crit = Criterion(
        "C8",
        "|r| = 1 on renormalized paths; drift <= C h^4 span with renormalization off; u . dr/dtheta = 0",
        {"renormalized_norm_error": on_err, "unrenormalized_drift": drift, "transversality": transversality},
        {"renormalized_norm_error": 0.0, "unrenormalized_drift": 0.0, "transversality": 0.0},
        {"renormalized_norm_error": 1e-12, "unrenormalized_drift": bound, "transversality": 1e-14},
        ok,
        2.0,
    )
    crit.details = {"C": c_const, "h": h_off, "field_evaluations": diag.evaluations}
    return crit


@_timed
def decoupling_and_confinement(samples=1_000_000):
    rng = np.random.default_rng(SEED + 3)
    theta = rng.uniform(0.0, 20 * math.pi, 2000)
    dec = 0.0
    conf = 0.0
    for name in ("fig1", "fig2", "fig3", "fig3-ergodic"):
        for layer in presets.get_preset(name).layers:
            cfg = layer.config
            dec = max(dec, float(np.max(np.abs(sphere.r_curve(cfg, theta) @ cfg.q - sphere.t_curve(cfg, theta) @ cfg.q))))
            b = sphere.bounds(cfg)
            z = np.concatenate([sphere.r_curve(cfg, theta) @ cfg.q, sphere.r_strobe(cfg, np.arange(2000)) @ cfg.q])
            conf = max(conf, float(np.max(np.maximum(b.lower - z, z - b.upper))))
    erg = presets.fig3_ergodic().primary.config
    b = sphere.bounds(erg)
    r = sphere.r_strobe(erg, np.arange(samples))
    z = r @ erg.q
    gap_low = float(z.min() - b.lower)
    gap_high = float(b.upper - z.max())
    cells = sphere.band_coverage(r, erg.q, b.lower, b.upper, n_lon=12, n_lat=3)
    visited = int(np.count_nonzero(cells))
    ok = dec <= 1e-12 and conf <= 1e-9 and gap_low <= 1e-4 and gap_high <= 1e-4 and visited == 36
    return Criterion(
        "C9",
        "r.q = t.q; samples inside the parallels; ergodic preset reaches both parallels and all 36 band cells",
        {"decoupling": dec, "band_excess": conf, "gap_to_lower": gap_low, "gap_to_upper": gap_high, "cells_visited": visited},
        {"decoupling": 0.0, "band_excess": 0.0, "gap_to_lower": 0.0, "gap_to_upper": 0.0, "cells_visited": 36},
        {"decoupling": 1e-12, "band_excess": 1e-9, "gap_to_lower": 1e-4, "gap_to_upper": 1e-4},
        ok,
        10.0,
    )


def richardson(counts=(400, 800, 1600)):
    cfg = presets.fig1().primary.config
    # one period of the closed lambda = 3 curve
    return bloch.convergence_study(cfg, math.pi, counts)


@_timed
def integrator_order():
    steps, errors, orders = richardson()
    ok = all(3.8 <= o <= 4.2 for o in orders)
    crit = Criterion("C10", "RK4 observed global order over one period (fig1)", orders, 4.0, [3.8, 4.2], ok, 5.0)
    crit.details = {"steps": steps, "errors": errors}
    return crit


CHECKS = [
    bounds_reproduction,
    map_matches_closed_form,
    flow_is_sampled,
    general_closed_forms,
    periodicity_arithmetic,
    symmetry_orders,
    fig2_dot_count,
    conservation,
    decoupling_and_confinement,
    integrator_order,
]


def run_all(checks=CHECKS):
    return [check() for check in checks]


def report(results) -> dict:
    return {
        "criteria": [c.record() for c in results],
        "errata": ERRATA,
        "all_pass": all(c.passed for c in results),
    }


def write_report(results, out_dir):
    """Write ``acceptance.json``, ``acceptance.csv`` and ``convergence.svg``."""
    from . import plotting

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.emit_json(report(results), out / "acceptance.json")
    lines = ["criterion_id,pass,description"]
    for c in results:
        lines.append(f"{c.criterion_id},{str(bool(c.passed)).lower()},\"{c.description}\"")
    io.write_text(out / "acceptance.csv", "\n".join(lines) + "\n")
    steps, errors, _ = richardson()
    plotting.convergence_figure(steps, errors, out / "convergence.svg")
    return out / "acceptance.json"
