"""Closed-form squeezing parameters and single-photon moments.

Single-photon moments of an arbitrary product state are computed from

    Tr(O E+ rho0 E-) = sum_{p,q} Tr(s~_q^dag O s~_p rho0),   s~_p = e^{-i k_d.r_p} s-_p,

with ``O`` a sum of one- or two-site operators.  Every coincidence pattern of
the site labels (p, q and the operator sites) is one set partition of those
labels, and each pattern is a distinct-index sum handled by
:func:`postselect_squeeze.sums.distinct_product_sum`.  The whole evaluation
is therefore O(n) per moment.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import ImpossibleDetection, InvalidParameter
from .model import ProductState, WaveDirection
from .moments import FieldMoments
from .sums import distinct_product_sum, set_partitions

IMPOSSIBLE_TOL = 1e-12
INTEGER_SNAP = 1e-9

__all__ = [
    "distinct_product_sum",
    "xi2_fully_excited",
    "xi2_fully_mixed",
    "optimal_nu_fully_mixed",
    "fully_excited_moments",
    "population_moments",
    "population_weight",
    "xi2_population",
    "population_threshold",
    "single_photon_moments",
    "single_photon_intensity",
    "homogeneous_css_moments",
]


def _check_counts(n, nu, lo=1):
    if n < 2:
        raise InvalidParameter(f"need n >= 2 emitters, got {n}")
    if not (lo <= nu <= n - 1):
        raise InvalidParameter(f"photon count {nu} outside [{lo}, {n - 1}]")


# -- scalar closed forms ------------------------------------------------------


def xi2_fully_excited(n: int, nu: int) -> float:
    """Squeezing after ``nu`` detections from the fully excited state."""
    _check_counts(n, nu, lo=0)
    return (n - 2 * nu) ** 2 / n ** 2


def _fully_mixed_ratio(n, nu, f):
    num = nu * nu + n * (n - nu)
    den = n + nu * (nu - 1) + 2 * nu * (n - nu) * f / (n * (n - 1))
    return num, den


def xi2_fully_mixed(n: int, nu: int, f: float):
    """Fully mixed ensemble, ``f`` the structure factor at ``k_d - k_w``.

    Returns ``None`` when the denominator is not positive.
    """
    _check_counts(n, nu)
    if f < -n:
        raise InvalidParameter(f"structure factor {f} below -n")
    num, den = _fully_mixed_ratio(n, nu, f)
    if den <= 0:
        return None
    return num / den


def optimal_nu_fully_mixed(n: int):
    """Best photon number for the fully mixed ensemble with ``k_d = k_w``.

    Returns ``(nu_real, nu_int, xi2_at_nu_int)``; ``nu_int`` is whichever of
    floor/ceil of the stationary point (clamped to 1..n-1) gives lower xi2.
    """
    if n < 2:
        raise InvalidParameter(f"need n >= 2 emitters, got {n}")
    nf = float(n)
    nu_real = (-nf - nf * nf + math.sqrt(nf * nf + 3.0 * nf ** 4)) / (nf - 1.0)
    f = n * (n - 1)
    candidates = sorted({min(max(c, 1), n - 1) for c in (math.floor(nu_real), math.ceil(nu_real))})
    best = min(candidates, key=lambda c: (xi2_fully_mixed(n, c, f), c))
    return nu_real, best, xi2_fully_mixed(n, best, f)


def _v_z(theta_bar):
    if not (0.0 < theta_bar <= math.pi):
        if theta_bar == 0.0:
            raise ImpossibleDetection("the ground state (theta_bar = 0) emits no photons")
        raise InvalidParameter(f"theta_bar must lie in (0, pi], got {theta_bar}")
    return -math.cos(theta_bar)


def population_weight(n: int, nu: int, theta_bar: float) -> float:
    """``Tr[(E+)^nu rho0 (E-)^nu]`` for the homogeneous population state."""
    _check_counts(n, nu, lo=0)
    sh = math.sin(theta_bar / 2.0)
    try:
        return float(math.factorial(nu) ** 2 * math.comb(n, nu)) * sh ** (2 * nu)
    except OverflowError:
        pass
    if sh == 0.0:
        return 0.0
    # (nu!)^2 alone overflows a double near nu = 100
    log_w = math.lgamma(nu + 1) + math.lgamma(n + 1) - math.lgamma(n - nu + 1) \
        + 2 * nu * math.log(sh)
    return math.exp(log_w) if log_w < 709.0 else math.inf


def population_moments(n: int, nu: int, theta_bar: float, f: float) -> FieldMoments:
    """Moments after ``nu`` detections along one ``k_d`` from a population state.

    ``f`` is the structure factor at ``k_d - k_w``.
    """
    _check_counts(n, nu)
    v = _v_z(theta_bar)
    # normalised moments stay exact even when the weight under/overflows
    weight = population_weight(n, nu, theta_bar)
    z1 = -nu + v * (n - nu)
    x2 = n + (1.0 + v) * nu * (n - nu) * f / (n * (n - 1))
    # Kronecker guards: the (v^z)^2 pair term needs two spare undetected emitters
    edge = 0 if (n == 2 or nu == n - 1) else 1
    z2 = n + nu * (nu - 1) - 2 * nu * (n - nu) * v + edge * (n - nu) * (n - nu - 1) * v * v
    return FieldMoments.diagonal(n, (0.0, 0.0, z1), (x2, x2, z2), weight)


def xi2_population(n: int, nu: int, theta_bar: float):
    _check_counts(n, nu)
    _v_z(theta_bar)
    c = math.cos(theta_bar)
    s2 = math.sin(theta_bar) ** 2
    num = n * n + (nu * nu - nu * n) * (1.0 - c) ** 2
    den = n + n * (n - 1) * c * c - (nu * nu - nu * (2 * n - 1)) * s2
    if den <= 0:
        return None
    return num / den


def population_threshold(n: int, theta_bar: float):
    """Smallest ``nu`` with ``nu > (n-1) cos^2(theta_bar/2)``, or ``None`` if above n-1.

    Thresholds within 1e-9 of an integer are snapped to it, so the boundary
    photon number (where xi2 is exactly 1) is never counted as squeezing.
    """
    if n < 3:
        raise InvalidParameter(f"threshold is defined for n >= 3, got {n}")
    _v_z(theta_bar)
    x = (n - 1) * math.cos(theta_bar / 2.0) ** 2
    r = round(x)
    if abs(x - r) <= INTEGER_SNAP:
        x = float(r)
    nu = math.floor(x) + 1
    return nu if nu <= n - 1 else None


def fully_excited_moments(n: int, nu: int) -> FieldMoments:
    """Dicke-state moments after ``nu`` detections from ``|e...e>`` (``k_w = k_d``)."""
    _check_counts(n, nu, lo=0)
    z = n - 2 * nu
    x2 = (n * (n + 2) - z * z) / 2.0
    weight = math.factorial(nu) ** 2 * math.comb(n, nu)
    return FieldMoments.diagonal(n, (0.0, 0.0, z), (x2, x2, z * z), weight)


# -- single-photon moments of arbitrary product states -------------------------

_SM = np.array([[0, 1], [0, 0]], dtype=complex)  # |g><e| in the (g, e) basis
_SP = _SM.T.copy()
_SZ = np.diag([-1.0, 1.0]).astype(complex)


def _site_ops(coef_minus, coef_plus=None, coef_z=None):
    """Per-site 2x2 operators ``a s- + b s+ + c sz`` stacked as (n, 2, 2)."""
    a = np.asarray(coef_minus, dtype=complex)
    out = a[:, None, None] * _SM
    if coef_plus is not None:
        out = out + np.asarray(coef_plus, dtype=complex)[:, None, None] * _SP
    if coef_z is not None:
        out = out + np.asarray(coef_z, dtype=complex)[:, None, None] * _SZ
    return out


@lru_cache(maxsize=None)
def _partitions(m):
    return tuple(tuple(tuple(b) for b in p) for p in set_partitions(range(m)))


def _conditioned_trace(rho, chain, homogeneous_n=None):
    """``sum over site labels of Tr(chain[0] chain[1] ... rho)``, labels may coincide.

    ``chain`` is ordered left to right; the site-label coincidence patterns are
    the set partitions of its positions.  With ``homogeneous_n`` every operator
    array has a single row and the distinct sums reduce to falling factorials.
    """
    m = len(chain)
    total = 0j
    for blocks in _partitions(m):
        factors = []
        for block in blocks:
            prod = chain[block[0]]
            for j in block[1:]:
                prod = prod @ chain[j]
            factors.append(np.einsum("nij,nji->n", prod, rho))
        if homogeneous_n is None:
            total += distinct_product_sum(factors)
        else:
            k = len(factors)
            if homogeneous_n < k:
                continue
            term = math.perm(homogeneous_n, k)
            for fac in factors:
                term = term * fac[0]
            total += term
    return total


class _SinglePhoton:
    """Unnormalised traces against ``E+_kd rho0 E-_kd`` for one product state."""

    def __init__(self, rho, phase_d, homogeneous_n=None):
        self.rho = rho
        self.hn = homogeneous_n
        w = np.exp(-1j * phase_d)
        self.lower = _site_ops(w)          # s~_p, rightmost in the chain
        self.raise_ = _site_ops(np.zeros_like(w), w.conj())  # s~_q^dag, leftmost

    def trace(self, *ops):
        return _conditioned_trace(self.rho, (self.raise_, *ops, self.lower), self.hn)


def _rho_stack(state: ProductState):
    return np.stack([e.matrix() for e in state.emitters])


def _quadrature_ops(phase_w):
    u = np.exp(-1j * phase_w)
    n = u.shape[0]
    return (
        _site_ops(u, u.conj()),
        _site_ops(1j * u, -1j * u.conj()),
        _site_ops(np.zeros(n), None, np.ones(n)),
    )


def _moments_from(sp: _SinglePhoton, ops, n) -> FieldMoments:
    F = sp.trace().real
    if F <= IMPOSSIBLE_TOL:
        raise ImpossibleDetection(f"single-photon weight {F:.3g} is numerically zero")
    first = np.array([sp.trace(op).real for op in ops]) / F
    second = np.empty((3, 3))
    for i in range(3):
        for j in range(i, 3):
            second[i, j] = second[j, i] = sp.trace(ops[i], ops[j]).real / F
    return FieldMoments(n, first, second, F)


def single_photon_moments(
    state: ProductState, k_d: WaveDirection, k_w: WaveDirection | None = None
) -> FieldMoments:
    """Moments of (X_kw, Y_kw, Z) after one photon detected along ``k_d``.

    ``k_w`` defaults to ``k_d``.  ``weight`` of the result is the detection
    weight ``F``.  Cost is linear in the number of emitters.
    """
    k_w = k_d if k_w is None else k_w
    g = state.geometry
    sp = _SinglePhoton(_rho_stack(state), g.phases(k_d))
    return _moments_from(sp, _quadrature_ops(g.phases(k_w)), state.n)


def single_photon_intensity(
    state: ProductState, k_d: WaveDirection, k_w: WaveDirection
) -> float:
    """``<E-_kw E+_kw>`` after one photon detected along ``k_d``."""
    g = state.geometry
    sp = _SinglePhoton(_rho_stack(state), g.phases(k_d))
    F = sp.trace().real
    if F <= IMPOSSIBLE_TOL:
        raise ImpossibleDetection(f"single-photon weight {F:.3g} is numerically zero")
    u = np.exp(-1j * g.phases(k_w))
    e_minus = _site_ops(np.zeros_like(u), u.conj())
    e_plus = _site_ops(u)
    return max(sp.trace(e_minus, e_plus).real / F, 0.0)


def _homogeneous_css(n, theta):
    if not (0.0 < theta <= math.pi):
        if theta == 0.0:
            raise ImpossibleDetection("the ground state (theta = 0) emits no photons")
        raise InvalidParameter(f"theta must lie in (0, pi], got {theta}")
    ee = math.sin(theta / 2.0) ** 2
    gg = math.cos(theta / 2.0) ** 2
    c = math.sin(theta / 2.0) * math.cos(theta / 2.0)
    return ee, gg, c


def homogeneous_css_moments(n: int, theta: float) -> FieldMoments:
    """Phase-free single-photon moments of a CSS with ``k_d = k_w = k_L``.

    Diagonal entries use the closed forms with falling factorials; the X-Z
    cross moment (the only other nonzero entry) comes from the same
    coincidence expansion evaluated homogeneously.
    """
    if n < 2:
        raise InvalidParameter(f"need n >= 2 emitters, got {n}")
    ee, gg, c = _homogeneous_css(n, theta)
    N = n
    p2 = N * (N - 1)
    p3 = p2 * (N - 2)
    p4 = p3 * (N - 3)
    d = ee - gg
    F = N * ee + p2 * c * c
    if F <= IMPOSSIBLE_TOL:
        raise ImpossibleDetection(f"single-photon weight {F:.3g} is numerically zero")
    # eg = ge = c, so (eg + ge) = 2c and (eg - ge) = 0
    x1 = (ee * 2 * c * p2 + ee * c * p2 + ee * c * p2 + c * c * 2 * c * p3) / F
    z1 = (-N * ee + p2 * ee * d - 2 * c * c * p2 + c * c * d * p3) / F
    x2 = N + (
        p3 * ee * (2 * c) ** 2
        + 2 * p2 * ee * ee
        + 2 * p3 * ee * 2 * c * c
        + 2 * p3 * ee * 2 * c * c
        + p4 * (2 * c) ** 2 * c * c
    ) / F
    y2 = N + 2 * p2 * ee * ee / F
    z2 = N + (
        -2 * p2 * ee * d
        + p3 * d * d * ee
        + 2 * p2 * c * c
        - 4 * p3 * c * d * c
        + p4 * d * d * c * c
    ) / F

    rho = np.array([[[gg, c], [c, ee]]], dtype=complex)
    sp = _SinglePhoton(rho, np.zeros(1), homogeneous_n=N)
    xop, _, zop = _quadrature_ops(np.zeros(1))
    xz = sp.trace(xop, zop).real / F
    second = np.array([[x2, 0.0, xz], [0.0, y2, 0.0], [xz, 0.0, z2]])
    return FieldMoments(N, (x1, 0.0, z1), second, F)
