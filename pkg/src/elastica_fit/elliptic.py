"""Jacobi elliptic functions and elliptic integrals.

Conventions:

* modulus ``k`` (not the parameter ``m = k**2``);
* ``incomplete_F`` takes the amplitude angle, ``incomplete_E`` takes the
  Jacobi argument ``u`` (it is the integral of ``dn**2``);
* the k-domain is extended past 1 via
  ``sn(u,k) = sn(k*u, 1/k)/k``, ``cn(u,k) = dn(k*u, 1/k)``,
  ``dn(u,k) = cn(k*u, 1/k)``, ``E(u,k) = k*E(k*u, 1/k) + u*(1-k^2)``, and
  ``K(k) = K(1/k)/(2k)`` so that cn always has period 4K.

Evaluation is by the arithmetic-geometric mean: descending Landen for K and
F, the AGM angle recursion for am.  All functions are pure; the scalar
kernels are numba-compiled unless disabled (see ``_accel``).
"""

import math
from typing import NamedTuple

import numpy as np

from ._accel import maybe_njit
from .errors import DomainError, SingularModulusError

#: half-width of the excluded band around k = 1, where K diverges
K_GUARD_BAND = 1e-9

_TOL = 1e-15
_MAX_AGM = 64


class EllipticTriple(NamedTuple):
    sn: float
    cn: float
    dn: float


# ---------------------------------------------------------------------------
# scalar kernels (k strictly below 1 unless noted); no validation inside

@maybe_njit
def _agm_K(k):
    a = 1.0
    b = math.sqrt((1.0 - k) * (1.0 + k))
    while abs(a - b) > _TOL * a:
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


@maybe_njit
def _am(u, k):
    # AGM angle recursion (backward), valid for all real u
    if k < 1e-14:
        return u
    a = 1.0
    b = math.sqrt((1.0 - k) * (1.0 + k))
    ca = np.empty(_MAX_AGM)
    aa = np.empty(_MAX_AGM)
    n = 0
    c = k
    while abs(c) > _TOL and n < _MAX_AGM - 1:
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        n += 1
        ca[n] = c
        aa[n] = a
    phi = (2.0 ** n) * a * u
    for i in range(n, 0, -1):
        x = ca[i] / aa[i] * math.sin(phi)
        if x > 1.0:
            x = 1.0
        elif x < -1.0:
            x = -1.0
        phi = 0.5 * (phi + math.asin(x))
    return phi


@maybe_njit
def _F_E_legendre(phi, k):
    # ascending Landen; returns (F(phi,k), E(phi,k)), amplitude convention
    if k < 1e-14:
        return phi, phi
    m = np.rint(phi / math.pi)
    phin = phi - math.pi * m
    a = 1.0
    b = math.sqrt((1.0 - k) * (1.0 + k))
    c = k
    csum = 0.5 * c * c
    esum = 0.0
    twon = 1.0
    it = 0
    while abs(c) > _TOL and it < _MAX_AGM:
        base = math.atan2(b * math.sin(phin), a * math.cos(phin))
        phin = phin + base + math.pi * np.rint((phin - base) / math.pi)
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        twon *= 2.0
        csum += 0.5 * twon * c * c
        esum += c * math.sin(phin)
        it += 1
    quarter = math.pi / (2.0 * a)
    f_red = phin / (twon * a)
    e_complete = quarter * (1.0 - csum)
    e_red = f_red * (1.0 - csum) + esum
    return f_red + 2.0 * m * quarter, e_red + 2.0 * m * e_complete


@maybe_njit
def _jacobi_lo(u, k):
    # k in [0, 1)
    phi = _am(u, k)
    sn = math.sin(phi)
    cn = math.cos(phi)
    dn = math.sqrt(1.0 - (k * sn) * (k * sn))
    return sn, cn, dn


@maybe_njit
def _jacobi(u, k):
    if k > 1.0:
        sni, cni, dni = _jacobi_lo(k * u, 1.0 / k)
        return sni / k, dni, cni
    return _jacobi_lo(u, k)


@maybe_njit
def _E_jacobi(u, k):
    # integral of dn^2 from 0 to u, any k outside the guard band
    if k > 1.0:
        ki = 1.0 / k
        e = _F_E_legendre(_am(k * u, ki), ki)[1]
        return k * e + u * (1.0 - k * k)
    return _F_E_legendre(_am(u, k), k)[1]


@maybe_njit
def _quarter_period(k):
    if k > 1.0:
        return _agm_K(1.0 / k) / (2.0 * k)
    return _agm_K(k)


@maybe_njit
def _jacobi_E_arr(u, k):
    # vectorized (sn, cn, dn, E) over an array of arguments, shared modulus
    n = u.shape[0]
    sn = np.empty(n)
    cn = np.empty(n)
    dn = np.empty(n)
    ee = np.empty(n)
    for i in range(n):
        s, c, d = _jacobi(u[i], k)
        sn[i] = s
        cn[i] = c
        dn[i] = d
        ee[i] = _E_jacobi(u[i], k)
    return sn, cn, dn, ee


# ---------------------------------------------------------------------------
# public surface (validating wrappers)

def _check_finite(*vals):
    for v in vals:
        if not math.isfinite(v):
            raise DomainError(f"non-finite argument: {v!r}")


def _check_modulus(k):
    _check_finite(k)
    if k < 0.0:
        raise DomainError(f"modulus must be nonnegative, got {k}")
    if abs(k - 1.0) <= K_GUARD_BAND:
        raise SingularModulusError(
            f"modulus {k} lies in the guard band around 1 (K diverges)")


def jacobi(u: float, k: float) -> EllipticTriple:
    """sn, cn, dn at argument u and modulus k (extended domain for k > 1)."""
    _check_finite(u)
    _check_modulus(k)
    return EllipticTriple(*_jacobi(u, k))


def am(u: float, k: float) -> float:
    """Elliptic amplitude, the inverse of ``incomplete_F``; requires k < 1."""
    _check_finite(u)
    _check_modulus(k)
    if k >= 1.0:
        raise DomainError(f"am requires modulus < 1, got {k}")
    return _am(u, k)


def incomplete_F(phi: float, k: float) -> float:
    """Incomplete elliptic integral of the first kind; requires k < 1."""
    _check_finite(phi)
    _check_modulus(k)
    if k >= 1.0:
        raise DomainError(f"incomplete_F requires modulus < 1, got {k}")
    return _F_E_legendre(phi, k)[0]


def incomplete_E(u: float, k: float) -> float:
    """Integral of dn(t,k)^2 over [0, u]; valid for all k outside the guard band."""
    _check_finite(u)
    _check_modulus(k)
    return _E_jacobi(u, k)


def quarter_period(k: float) -> float:
    """K(k); for k > 1 the non-analytic extension K(1/k)/(2k)."""
    _check_modulus(k)
    return _quarter_period(k)
