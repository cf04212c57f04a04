"""SU(2) elements as unit quaternions.

An element ``exp(i gamma/2 sigma.s)`` is stored as the float array
``[w, vx, vy, vz]`` with ``w = cos(gamma/2)`` and ``v = sin(gamma/2) s``.
Every function broadcasts over leading axes, so a stack of shape
``(..., 4)`` is processed in one call.

Conjugating ``sigma.x`` by ``exp(i gamma/2 sigma.s)`` gives ``sigma.x'`` with

    x' = cos(gamma) x + sin(gamma) x cross s + (1 - cos(gamma)) (s.x) s

which is what :func:`rotate_vector` computes. The sine term carries
``x cross s``, so a positive ``gamma`` turns clockwise about ``s`` when viewed
from the tip of ``s``. This orientation is used everywhere in the package.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import InvalidParameterError, NumericalInstabilityError

UNIT_TOL = 1e-12
MUL_DRIFT = 1e-14
DEGENERATE_TOL = 1e-14
DEFAULT_AXIS = np.array([0.0, 0.0, 1.0])

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


class AxisAngle(NamedTuple):
    axis: np.ndarray
    angle: float | np.ndarray


class AxisAngleResult(NamedTuple):
    """Axis-angle coordinates of an element.

    ``exp_axis_angle(axis, angle) == sign * g``; ``degenerate`` marks
    elements equal to +-identity, whose axis is the default ``[0, 0, 1]``.
    """

    axis: np.ndarray
    angle: float | np.ndarray
    sign: float | np.ndarray
    degenerate: bool | np.ndarray


def as_unit_vector(v, name="vector", tol=UNIT_TOL):
    """Return ``v`` as a float array, raising if any row is not unit length."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != 3:
        raise InvalidParameterError(f"{name} must have 3 components, got shape {v.shape}")
    err = np.abs(np.linalg.norm(v, axis=-1) - 1.0)
    if not np.all(err <= tol):
        raise InvalidParameterError(f"{name} is not a unit vector (| |v| - 1 | = {np.max(err):.3g})")
    return v


def normalized(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def exp_axis_angle(axis, angle):
    """Element ``exp(i angle/2 sigma.axis)``; ``axis`` must be unit length."""
    axis = as_unit_vector(axis, "axis")
    half = 0.5 * np.asarray(angle, dtype=float)
    w = np.cos(half)
    v = np.sin(half)[..., None] * axis
    w = np.broadcast_to(w, v.shape[:-1])
    return np.concatenate([w[..., None], v], axis=-1)


def _raw_mul(a, b):
    # (w1 + i s.v1)(w2 + i s.v2) = w1 w2 - v1.v2 + i s.(w1 v2 + w2 v1 - v1 x v2)
    w1, v1 = a[..., 0], a[..., 1:]
    w2, v2 = b[..., 0], b[..., 1:]
    w = w1 * w2 - np.sum(v1 * v2, axis=-1)
    v = w1[..., None] * v2 + w2[..., None] * v1 - np.cross(v1, v2)
    return np.concatenate([w[..., None], v], axis=-1)


def mul(a, b):
    """Group product ``a b``; renormalized when the norm drifts past 1e-14."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = _raw_mul(a, b)
    n = np.linalg.norm(out, axis=-1, keepdims=True)
    return np.where(np.abs(n - 1.0) > MUL_DRIFT, out / n, out)


def product(*elements):
    """Left-to-right product of any number of elements."""
    if not elements:
        return IDENTITY.copy()
    out = np.asarray(elements[0], dtype=float)
    for g in elements[1:]:
        out = mul(out, g)
    return out


def inverse(g):
    g = np.asarray(g, dtype=float)
    return g * np.array([1.0, -1.0, -1.0, -1.0])


def conjugate(a, g):
    """``a g a^-1``. Preserves the rotation angle of ``g``."""
    return mul(mul(a, g), inverse(a))


def power(g, k):
    """``g**k`` for real ``k``, taken along the one-parameter subgroup of ``g``.

    Uses the axis-angle form, so ``power(g, k)`` equals
    ``exp_axis_angle(axis, k * angle)`` with the sign of ``g`` folded in.
    Integer powers agree with repeated multiplication.
    """
    g = np.asarray(g, dtype=float)
    res = axis_angle_of(g)
    out = exp_axis_angle(res.axis, np.asarray(k, dtype=float) * res.angle)
    if float(k) == int(k):
        sign = np.asarray(res.sign, dtype=float) ** int(k)
        out = out * np.asarray(sign)[..., None]
    return out


def rotate_vector(x, s, gamma):
    """Rotate ``x`` about the unit axis ``s`` by ``gamma``.

    Returns the vector part of ``S (sigma.x) S^-1`` with
    ``S = exp(i gamma/2 sigma.s)``; see the module docstring for the
    orientation convention.
    """
    s = as_unit_vector(s, "rotation axis")
    x = np.asarray(x, dtype=float)
    gamma = np.asarray(gamma, dtype=float)[..., None]
    c = np.cos(gamma)
    return c * x + np.sin(gamma) * np.cross(x, s) + (1.0 - c) * np.sum(s * x, axis=-1, keepdims=True) * s


def act(g, x):
    """Adjoint action of ``g`` on ``x``: vector part of ``g (sigma.x) g^-1``.

    Algebraically the same map as :func:`rotate_vector` with the axis and
    angle of ``g``, but evaluated with quaternion products.
    """
    g = np.asarray(g, dtype=float)
    x = np.asarray(x, dtype=float)
    xq = np.concatenate([np.zeros(x.shape[:-1] + (1,)), x], axis=-1)
    return _raw_mul(_raw_mul(g, xq), inverse(g))[..., 1:]


def axis_angle_of(g):
    """Axis, angle in ``[0, 2pi)``, sign and degeneracy flag of ``g``."""
    g = np.asarray(g, dtype=float)
    w = g[..., 0]
    v = g[..., 1:]
    vn = np.linalg.norm(v, axis=-1)
    degenerate = vn <= DEGENERATE_TOL
    safe = np.where(degenerate, 1.0, vn)
    axis = np.where(degenerate[..., None], DEFAULT_AXIS, v / safe[..., None])
    angle = np.where(degenerate, 0.0, 2.0 * np.arctan2(vn, w))
    sign = np.where(degenerate & (w < 0), -1.0, 1.0)
    if g.ndim == 1:
        return AxisAngleResult(axis, float(angle), float(sign), bool(degenerate))
    return AxisAngleResult(axis, angle, sign, degenerate)


def coordinates(g):
    """Lie-algebra coordinates ``c = (angle/2) axis`` of ``g``."""
    res = axis_angle_of(g)
    return 0.5 * np.asarray(res.angle)[..., None] * res.axis


def renormalize(g):
    """Scale ``g`` back to unit norm.

    Raises :class:`NumericalInstabilityError` when the norm has left
    ``(0.5, 1.5)``; such an iterate is not rescued.
    """
    g = np.asarray(g, dtype=float)
    n = np.linalg.norm(g, axis=-1, keepdims=True)
    if not np.all((n > 0.5) & (n < 1.5)):
        raise NumericalInstabilityError(f"group element norm {np.ravel(n)} outside (0.5, 1.5)")
    return g / n


def norm_error(g):
    return np.abs(np.linalg.norm(g, axis=-1) - 1.0)


def to_matrix(g):
    """2x2 complex matrix ``w 1 + i sigma.v``. Used as a test oracle."""
    g = np.asarray(g, dtype=float)
    w = g[..., 0]
    v = g[..., 1:]
    eye = np.eye(2, dtype=complex)
    return w[..., None, None] * eye + 1j * np.einsum("...k,kij->...ij", v, PAULI)


def from_matrix(m):
    """Inverse of :func:`to_matrix` for matrices in SU(2)."""
    m = np.asarray(m, dtype=complex)
    w = 0.5 * np.real(m[..., 0, 0] + m[..., 1, 1])
    # Tr(sigma_k M) = 2 i v_k
    v = np.stack([np.imag(np.einsum("ij,...ji->...", PAULI[k], m)) / 2.0 for k in range(3)], axis=-1)
    return np.concatenate([w[..., None], v], axis=-1)


def sigma_dot(x):
    """``sigma . x`` as a 2x2 Hermitian matrix."""
    return np.einsum("...k,kij->...ij", np.asarray(x, dtype=complex), PAULI)


def random_elements(rng, size=None):
    """Haar-uniform elements drawn from ``rng``."""
    shape = (4,) if size is None else (size, 4)
    return normalized(rng.normal(size=shape))


def random_unit_vectors(rng, size=None):
    shape = (3,) if size is None else (size, 3)
    return normalized(rng.normal(size=shape))
