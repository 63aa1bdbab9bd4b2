"""Closed-form evaluation of elastica segments and their derivatives.

The basic elastica through the origin with tangent angle 0 and initial
curvature 2k is

    zeta_k(s) = (2*E(s,k) - s,  2*k*(1 - cn(s,k))),

and every elastica segment is a scaled, rotated, translated piece of it:

    y(t) = w * R_phi * zeta_k(s0 + ell*t) + (x0, y0),   t in [0, 1].

All first and second derivatives with respect to arclength and the seven
parameters (k, s0, ell, w, phi, x0, y0) are available in closed form; the
second k-derivative divides by k and is undefined at k = 0.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._accel import maybe_njit
from .elliptic import K_GUARD_BAND, _E_jacobi, _jacobi
from .errors import DomainError, SingularModulusError

#: parameter order used for gradient / Hessian indexing
PARAM_NAMES = ("k", "s0", "ell", "w", "phi", "x0", "y0")

#: smallest modulus for which the second k-derivative is evaluated
K_MIN = 1e-6


@dataclass(frozen=True)
class ElasticaParams:
    """The seven control parameters of an elastica segment."""

    k: float
    s0: float
    ell: float
    w: float
    phi: float
    x0: float
    y0: float

    def __post_init__(self):
        vals = (self.k, self.s0, self.ell, self.w, self.phi, self.x0, self.y0)
        if not all(math.isfinite(v) for v in vals):
            raise DomainError(f"non-finite parameter in {vals}")
        if self.k < 0:
            raise DomainError(f"modulus must be nonnegative, got {self.k}")
        if abs(self.k - 1.0) <= K_GUARD_BAND:
            raise SingularModulusError(f"modulus {self.k} inside the k=1 guard band")
        if self.w <= 0:
            raise DomainError(f"scale w must be positive, got {self.w}")
        if self.ell == 0:
            raise DomainError("parameter extent ell must be nonzero")

    @property
    def length(self) -> float:
        return abs(self.ell) * self.w

    def as_array(self) -> np.ndarray:
        return np.array([self.k, self.s0, self.ell, self.w, self.phi,
                         self.x0, self.y0])

    @classmethod
    def from_array(cls, a) -> "ElasticaParams":
        return cls(*(float(v) for v in a))


class BasicDerivatives(NamedTuple):
    """Derivative blocks of the basic elastica at one (s, k)."""

    ds: np.ndarray
    dss: np.ndarray
    dk: np.ndarray
    dsk: np.ndarray
    dkk: np.ndarray


# ---------------------------------------------------------------------------
# kernels

@maybe_njit
def _zeta(s, k):
    sn, cn, dn = _jacobi(s, k)
    e = _E_jacobi(s, k)
    return 2.0 * e - s, 2.0 * k * (1.0 - cn)


@maybe_njit
def _zeta_blocks(s, k, with_kk):
    """zeta and its five derivative blocks, packed as a (6, 2) array:
    rows = value, d/ds, d2/ds2, d/dk, d2/dsdk, d2/dk2."""
    S, C, D = _jacobi(s, k)
    E = _E_jacobi(s, k)
    kp2 = 1.0 - k * k
    out = np.empty((6, 2))
    out[0, 0] = 2.0 * E - s
    out[0, 1] = 2.0 * k * (1.0 - C)
    out[1, 0] = 2.0 * D * D - 1.0
    out[1, 1] = 2.0 * k * S * D
    out[2, 0] = 2.0 * k * C * (-2.0 * k * S * D)
    out[2, 1] = 2.0 * k * C * (2.0 * D * D - 1.0)
    out[3, 0] = (2.0 / kp2) * k * (S * C * D - E * C * C - s * kp2 * S * S)
    out[3, 1] = (2.0 / kp2) * (kp2 + C * (k * k - D * D) - S * D * (E - s * kp2))
    f = (2.0 / kp2) * (S * D - C * (E - s * kp2))
    out[4, 0] = f * (-2.0 * k * S * D)
    out[4, 1] = f * (2.0 * D * D - 1.0)
    if with_kk:
        a0 = 2.0 * S * D * C * (D * D - k * k * E * E
                                + kp2 * (s * s * k * k - (E - s) ** 2 - 0.5))
        a1 = (1.0 / k) * ((1.0 - 2.0 * k * k * S * S) * (E - s)
                          * (2.0 * s * k * k + E - s) * C
                          + D * S * (s * kp2 - E) * (4.0 * k * k * C * C + kp2))
        b0 = ((E - s) * (C * C + D * D - 4.0 * C * C * D * D)
              + 2.0 * s * k * k * (2.0 * S * S - 1.0) * D * D - s * kp2)
        b1 = (-s * k * kp2 * D * S + s * s * k ** 3 * C
              + k * C * S * S * (2.0 - 2.0 * s * s * k ** 4
                                 - 2.0 * k * k * S * S + k * k))
        out[5, 0] = (2.0 / (kp2 * kp2)) * (a0 + b0)
        out[5, 1] = (2.0 / (kp2 * kp2)) * (a1 + b1)
    else:
        out[5, 0] = 0.0
        out[5, 1] = 0.0
    return out


@maybe_njit
def _segment_eval_arr(p, t):
    """Points of the parameterized segment at an array of t values.

    p is the 7-vector (k, s0, ell, w, phi, x0, y0); returns an (n, 2) array.
    """
    k, s0, ell, w, phi, x0, y0 = p[0], p[1], p[2], p[3], p[4], p[5], p[6]
    cphi = math.cos(phi)
    sphi = math.sin(phi)
    n = t.shape[0]
    out = np.empty((n, 2))
    for i in range(n):
        zx, zy = _zeta(s0 + ell * t[i], k)
        out[i, 0] = w * (cphi * zx - sphi * zy) + x0
        out[i, 1] = w * (sphi * zx + cphi * zy) + y0
    return out


@maybe_njit
def _segment_partials_arr(p, t, with_second):
    """Segment points with first (and optionally second) parameter partials.

    Returns (y, dy, d2y) with shapes (n, 2), (n, 7, 2), (n, 7, 7, 2).
    """
    k, s0, ell, w, phi, x0, y0 = p[0], p[1], p[2], p[3], p[4], p[5], p[6]
    cphi = math.cos(phi)
    sphi = math.sin(phi)
    n = t.shape[0]
    y = np.empty((n, 2))
    dy = np.zeros((n, 7, 2))
    d2y = np.zeros((n, 7, 7, 2))
    for i in range(n):
        ti = t[i]
        blocks = _zeta_blocks(s0 + ell * ti, k, with_second)
        # rotate all blocks once: rb = R_phi @ block, qb = R_{phi+pi/2} @ block
        rb = np.empty((6, 2))
        qb = np.empty((6, 2))
        for j in range(6):
            bx, by = blocks[j, 0], blocks[j, 1]
            rb[j, 0] = cphi * bx - sphi * by
            rb[j, 1] = sphi * bx + cphi * by
            qb[j, 0] = -rb[j, 1]
            qb[j, 1] = rb[j, 0]
        y[i, 0] = w * rb[0, 0] + x0
        y[i, 1] = w * rb[0, 1] + y0
        for c in range(2):
            dy[i, 0, c] = w * rb[3, c]              # k
            dy[i, 1, c] = w * rb[1, c]              # s0
            dy[i, 2, c] = ti * w * rb[1, c]         # ell
            dy[i, 3, c] = rb[0, c]                  # w
            dy[i, 4, c] = w * qb[0, c]              # phi
        dy[i, 5, 0] = 1.0                           # x0
        dy[i, 6, 1] = 1.0                           # y0
        if with_second:
            for c in range(2):
                d2y[i, 0, 0, c] = w * rb[5, c]          # k k
                d2y[i, 0, 1, c] = w * rb[4, c]          # k s0
                d2y[i, 0, 2, c] = ti * w * rb[4, c]     # k ell
                d2y[i, 0, 3, c] = rb[3, c]              # k w
                d2y[i, 0, 4, c] = w * qb[3, c]          # k phi
                d2y[i, 1, 1, c] = w * rb[2, c]          # s0 s0
                d2y[i, 1, 2, c] = ti * w * rb[2, c]     # s0 ell
                d2y[i, 1, 3, c] = rb[1, c]              # s0 w
                d2y[i, 1, 4, c] = w * qb[1, c]          # s0 phi
                d2y[i, 2, 2, c] = ti * ti * w * rb[2, c]  # ell ell
                d2y[i, 2, 3, c] = ti * rb[1, c]         # ell w
                d2y[i, 2, 4, c] = ti * w * qb[1, c]     # ell phi
                d2y[i, 3, 4, c] = qb[0, c]              # w phi
                d2y[i, 4, 4, c] = -w * rb[0, c]         # phi phi
            # symmetrize
            for a in range(7):
                for b in range(a):
                    for c in range(2):
                        d2y[i, a, b, c] = d2y[i, b, a, c]
    return y, dy, d2y


# ---------------------------------------------------------------------------
# public surface

def _check_basic_modulus(k):
    if not math.isfinite(k) or k < 0:
        raise DomainError(f"invalid modulus {k}")
    if abs(k - 1.0) <= K_GUARD_BAND:
        raise SingularModulusError(f"modulus {k} inside the k=1 guard band")


def basic_point(s: float, k: float) -> np.ndarray:
    """Point of the basic elastica zeta_k at arclength s."""
    _check_basic_modulus(k)
    if not math.isfinite(s):
        raise DomainError(f"non-finite arclength {s}")
    return np.array(_zeta(s, k))


def basic_derivatives(s: float, k: float) -> BasicDerivatives:
    """All derivative blocks of zeta_k at (s, k); requires k >= K_MIN."""
    _check_basic_modulus(k)
    if k < K_MIN:
        raise DomainError(
            f"second k-derivative undefined for k < {K_MIN} (got {k})")
    b = _zeta_blocks(s, k, True)
    return BasicDerivatives(ds=b[1].copy(), dss=b[2].copy(), dk=b[3].copy(),
                            dsk=b[4].copy(), dkk=b[5].copy())


def segment_eval(p: ElasticaParams, t: float) -> np.ndarray:
    """Point of the transformed segment at parameter t (constant speed |ell|*w)."""
    return _segment_eval_arr(p.as_array(), np.array([float(t)]))[0]


def segment_eval_many(p: ElasticaParams, t: np.ndarray) -> np.ndarray:
    """Vectorized ``segment_eval`` over an array of parameter values."""
    return _segment_eval_arr(p.as_array(), np.asarray(t, dtype=float))


def segment_curvature(p: ElasticaParams, t: float) -> float:
    """Signed curvature (2k/w) * cn(s0 + ell*t, k)."""
    if p.k == 0:
        return 0.0
    _, cn, _ = _jacobi(p.s0 + p.ell * float(t), p.k)
    return 2.0 * p.k / p.w * cn


class ElasticaCurve:
    """Curve-protocol adapter exposing an elastica segment as a plane curve,
    so exact elastica can be sampled, fitted, and used as test targets."""

    def __init__(self, params: ElasticaParams):
        self.params = params

    def point(self, t):
        return segment_eval(self.params, t)

    def derivative(self, t):
        p = self.params
        b = _zeta_blocks(p.s0 + p.ell * t, p.k, False)
        c, s = math.cos(p.phi), math.sin(p.phi)
        return p.ell * p.w * np.array([c * b[1, 0] - s * b[1, 1],
                                       s * b[1, 0] + c * b[1, 1]])

    def second_derivative(self, t):
        p = self.params
        b = _zeta_blocks(p.s0 + p.ell * t, p.k, False)
        c, s = math.cos(p.phi), math.sin(p.phi)
        return p.ell ** 2 * p.w * np.array([c * b[2, 0] - s * b[2, 1],
                                            s * b[2, 0] + c * b[2, 1]])

    def trimmed(self, t0, t1):
        p = self.params
        return ElasticaCurve(ElasticaParams(
            k=p.k, s0=p.s0 + p.ell * t0, ell=p.ell * (t1 - t0),
            w=p.w, phi=p.phi, x0=p.x0, y0=p.y0))


def segment_partials(p: ElasticaParams, t: float, second: bool = True):
    """First (and second) partials of segment_eval with respect to the seven
    parameters: arrays of shape (7, 2) and (7, 7, 2)."""
    if second and p.k < K_MIN:
        raise DomainError(f"second partials need k >= {K_MIN} (got {p.k})")
    y, dy, d2y = _segment_partials_arr(p.as_array(), np.array([float(t)]), second)
    if second:
        return dy[0], d2y[0]
    return dy[0], None
