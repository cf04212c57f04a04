"""Frozen parameter sets for the figure experiments.

All presets share ``p = [1, 0, 0]``, ``q = [0, 0, 1]``, ``r0 = [0.6, 0, 0.8]``
and ``omega = 1``; angles are given in degrees and kept exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import sympy

from .errors import InvalidParameterError
from .sphere import SphereConfig, closure_index

ERGODIC_LAMBDA = sympy.sqrt(2) - sympy.Rational(389, 1000)
SHOWN_LOOPS = 7


@dataclass(frozen=True)
class Layer:
    """One sampled orbit drawn in a figure.

    ``count`` is the number of stroboscopic samples ``K = 0 .. count - 1``.
    """

    name: str
    config: SphereConfig
    count: int
    style: str  # "curve" or "dots"


@dataclass(frozen=True)
class FigurePreset:
    id: str
    title: str
    layers: tuple
    mark_initial: bool = False

    @property
    def primary(self) -> Layer:
        return self.layers[-1]


def _cfg(alpha, beta=None, lam=None):
    return SphereConfig.build(alpha, beta, lam, degrees=True)


def _closed_count(cfg):
    # one full period, endpoint included so the drawn curve closes
    return closure_index(cfg).k + 1


def _loops_count(cfg, loops):
    clo = closure_index(cfg)
    return math.ceil(clo.k * loops / clo.m) + 1


def fig1() -> FigurePreset:
    cfg = _cfg("0.01", "0.06")
    return FigurePreset("fig1", "alpha = 0.01 deg, beta = 0.06 deg, lambda = 3", (Layer("dense", cfg, _closed_count(cfg), "curve"),))


def fig2() -> FigurePreset:
    dense = _cfg("0.01", "0.04")
    dots = _cfg(2, 8)
    return FigurePreset(
        "fig2",
        "alpha = 2 deg, beta = 8 deg (dots); alpha = 0.01 deg, beta = 0.04 deg; lambda = 2",
        (Layer("dense", dense, _closed_count(dense), "curve"), Layer("dots", dots, closure_index(dots).k, "dots")),
    )


def fig3() -> FigurePreset:
    cfg = _cfg("0.01", "0.0205")
    return FigurePreset(
        "fig3",
        f"alpha = 0.01 deg, beta = 0.0205 deg, lambda = 41/40 (first {SHOWN_LOOPS} loops)",
        (Layer("dense", cfg, _loops_count(cfg, SHOWN_LOOPS), "curve"),),
        mark_initial=True,
    )


def fig3_ergodic() -> FigurePreset:
    cfg = _cfg("0.01", lam=ERGODIC_LAMBDA)
    # same sample budget as fig3
    count = _loops_count(_cfg("0.01", "0.0205"), SHOWN_LOOPS)
    return FigurePreset(
        "fig3-ergodic",
        "alpha = 0.01 deg, lambda = sqrt(2) - 0.389",
        (Layer("dense", cfg, count, "curve"),),
        mark_initial=True,
    )


PRESETS = {"fig1": fig1, "fig2": fig2, "fig3": fig3, "fig3-ergodic": fig3_ergodic}


def get_preset(name: str) -> FigurePreset:
    try:
        return PRESETS[name]()
    except KeyError:
        raise InvalidParameterError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
