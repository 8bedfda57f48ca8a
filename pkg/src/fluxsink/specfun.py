"""Bessel and Hankel functions of real and purely imaginary order.

The radial problems in this package reduce to Bessel's equation

    y'' + y'/x + (1 - nu^2/x^2) y = 0

with nu^2 of either sign.  For nu^2 >= 0 (order nu = mu real) every mature
library applies and we delegate to scipy's AMOS bindings.  For nu^2 < 0
(order nu = i*mu, mu > 0) there is no scipy support, so J_{i mu} and the
Hankel pair are evaluated here from scratch:

* ``x <= 14``: ascending power series accumulated in 80-bit extended
  precision.  The alternating sum loses ~e^x of headroom, so 14 keeps at
  least 12 good digits.
* ``14 < x < max(30, 10*mu)``: the same series in arbitrary precision
  (mpmath), with the working precision scaled to absorb the cancellation.
* ``x >= max(30, 10*mu)``: Hankel's large-argument expansion.  At
  x = 10*mu the smallest term is below ~1e-12 for every mu <= 50.

Supported box: order magnitude mu <= 50 and 0 < x <= 1e4.  Outside it the
functions raise RangeError rather than silently losing digits.

Conventions (fixed package-wide): time dependence e^{-iEt}, so
H^{(1)}_nu(x) ~ sqrt(2/(pi x)) e^{+i(x - nu pi/2 - pi/4)} is the outgoing
wave and H^{(2)} the ingoing one.  For real x, conj(J_{i mu}) = J_{-i mu}.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy import special as _sp

from .errors import DegenerateOrderError, PoleError, RangeError

__all__ = [
    "Order",
    "complex_gamma",
    "bessel_j",
    "bessel_j_pair",
    "hankel",
    "hankel_pair",
    "wronskian_check",
    "DegenerateOrderError",
]

ORDER_MAX = 50.0
X_MAX = 1.0e4

# Fast-series edge: e^14 ~ 1.2e6 of alternation headroom against the
# 1.1e-19 extended-precision ulp leaves ~12-13 digits.
_SERIES_FAST_EDGE = 14.0


# =====================================================================
# complex gamma (Lanczos)
# =====================================================================

_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)

_POLE_TOL = 1e-14


def complex_gamma(z: complex) -> complex:
    """Gamma(z) for complex z via the 15-term Lanczos approximation.

    Relative error is below 1e-13 for |z| <= 50 (validated against an
    arbitrary-precision reference).  The left half plane goes through the
    reflection formula Gamma(z) Gamma(1-z) = pi / sin(pi z).

    Raises
    ------
    PoleError
        If z is a non-positive real integer within 1e-14.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise RangeError(f"complex_gamma: non-finite argument {z!r}")
    if (
        abs(z.imag) <= _POLE_TOL
        and z.real <= 0.5
        and abs(z.real - round(z.real)) <= _POLE_TOL
    ):
        raise PoleError(f"gamma pole at z = {z!r}")
    return _lanczos(z)


def _lanczos(z: complex) -> complex:
    if z.real < 0.5:
        # sin(pi z) overflows only for |Im z| >~ 225, far outside the box
        return math.pi / (cmath.sin(math.pi * z) * _lanczos(1.0 - z))
    acc = _LANCZOS_C[0]
    for k in range(1, len(_LANCZOS_C)):
        acc += _LANCZOS_C[k] / (z - 1.0 + k)
    t = z + (_LANCZOS_G - 0.5)
    return math.sqrt(2.0 * math.pi) * t ** (z - 0.5) * cmath.exp(-t) * acc


# =====================================================================
# order tag
# =====================================================================


@dataclass(frozen=True)
class Order:
    """Bessel order, either mu (real) or i*mu (purely imaginary), mu >= 0.

    Mixed complex orders are out of scope; the two families cover the
    centrifugal strengths nu^2 >= 0 and nu^2 < 0 respectively.
    """

    kind: str  # "real" | "imaginary"
    mu: float

    def __post_init__(self) -> None:
        if self.kind not in ("real", "imaginary"):
            raise RangeError(f"unknown order kind {self.kind!r}")
        mu = float(self.mu)
        if not math.isfinite(mu):
            raise RangeError("order magnitude must be finite")
        if self.kind == "real" and not 0.0 <= mu <= ORDER_MAX:
            raise RangeError(f"real order mu={mu} outside [0, {ORDER_MAX}]")
        if self.kind == "imaginary" and not 0.0 < mu <= ORDER_MAX:
            raise RangeError(f"imaginary order mu={mu} outside (0, {ORDER_MAX}]")
        object.__setattr__(self, "mu", mu)

    @classmethod
    def real(cls, mu: float) -> "Order":
        return cls("real", mu)

    @classmethod
    def imaginary(cls, mu: float) -> "Order":
        return cls("imaginary", mu)

    @property
    def nu(self) -> complex:
        """The order as a complex number."""
        return complex(self.mu, 0.0) if self.kind == "real" else complex(0.0, self.mu)

    @property
    def nu_squared(self) -> float:
        return self.mu**2 if self.kind == "real" else -(self.mu**2)


def _check_x(x: float) -> float:
    x = float(x)
    if not math.isfinite(x) or not 0.0 < x <= X_MAX:
        raise RangeError(f"argument x={x!r} outside (0, {X_MAX}]")
    return x


def _check_finite(tag: str, *vals: complex) -> None:
    for v in vals:
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise RangeError(f"{tag}: result exceeded double dynamic range")


# =====================================================================
# imaginary order: ascending series
# =====================================================================


def _series_imag_fast(mu: float, x: float) -> tuple[complex, complex]:
    """(J_{i mu}(x), J'_{i mu}(x)) by power series in extended precision."""
    half = 0.5 * x
    # common prefactor (x/2)^{i mu} / Gamma(1 + i mu); unimodular power
    c0 = cmath.exp(1j * mu * math.log(half)) / complex_gamma(complex(1.0, mu))
    q = np.clongdouble(half * half)
    iu = np.clongdouble(0) + np.clongdouble(1) * 1j
    term = np.clongdouble(1) + np.clongdouble(0) * 1j
    s_val = term
    s_der = iu * np.clongdouble(mu)  # derivative weight (2k + i mu) at k = 0
    k = 0
    while True:
        k += 1
        term = term * (-q) / (np.clongdouble(k) * (np.clongdouble(k) + iu * np.clongdouble(mu)))
        s_val = s_val + term
        s_der = s_der + term * (np.clongdouble(2 * k) + iu * np.clongdouble(mu))
        if abs(complex(term)) < 1e-25 * max(abs(complex(s_val)), 1e-300):
            break
        if k > 400:  # cannot happen for x <= 14
            raise RangeError("imaginary-order series failed to converge")
    val = c0 * complex(s_val)
    der = c0 * complex(s_der) / x
    return val, der


def _series_imag_mp(mu: float, x: float) -> tuple[complex, complex]:
    """Same series in arbitrary precision for the cancellation-heavy zone."""
    dps = 30 + int(0.45 * x)
    with mp.workdps(dps):
        half = mp.mpf(x) / 2
        nu = mp.mpc(0, mu)
        c0 = mp.power(half, nu) / mp.gamma(1 + nu)
        q = half * half
        term = mp.mpc(1)
        s_val = mp.mpc(1)
        s_der = nu  # (2k + i mu) at k = 0
        k = 0
        limit = mp.mpf(10) ** (-(dps - 8))
        while True:
            k += 1
            term = term * (-q) / (k * (k + nu))
            s_val += term
            s_der += term * (2 * k + nu)
            if abs(term) < limit * max(abs(s_val), mp.mpf("1e-300")):
                break
            if k > 20000:
                raise RangeError("imaginary-order series failed to converge")
        val = c0 * s_val
        der = c0 * s_der / x
        return complex(val), complex(der)


def _j_imag_series(mu: float, x: float) -> tuple[complex, complex]:
    if x <= _SERIES_FAST_EDGE:
        return _series_imag_fast(mu, x)
    return _series_imag_mp(mu, x)


def _hankel_from_j_imag(
    mu: float, j: complex, jd: complex
) -> tuple[complex, complex, complex, complex]:
    """Connect (J_{i mu}, J_{-i mu}) to the Hankel pair.

    H1 = (e^{mu pi} J - conj J) / sinh(mu pi),
    H2 = (conj J - e^{-mu pi} J) / sinh(mu pi);  conj(J_{i mu}) = J_{-i mu}
    holds for real argument.  No cancellation: the numerator terms differ
    in scale by e^{mu pi} (large mu) or the quotient is O(1/mu) against an
    O(mu) denominator (small mu).
    """
    ep = math.exp(mu * math.pi)
    em = math.exp(-mu * math.pi)
    sh = math.sinh(mu * math.pi)
    h1 = (ep * j - j.conjugate()) / sh
    h1d = (ep * jd - jd.conjugate()) / sh
    h2 = (j.conjugate() - em * j) / sh
    h2d = (jd.conjugate() - em * jd) / sh
    return h1, h1d, h2, h2d


# =====================================================================
# imaginary order: Hankel's large-argument expansion
# =====================================================================


def _asym_edge(mu: float) -> float:
    return max(30.0, 10.0 * mu)


def _hankel_asym_imag(mu: float, x: float) -> tuple[complex, complex, complex, complex]:
    """Hankel pair of order i*mu from the large-argument expansion.

    H^{(1,2)} = sqrt(2/(pi x)) e^{+-i omega} S_{1,2},
    omega = x - i mu pi/2 - pi/4,  S = sum_k (+-i)^k a_k / x^k with the
    standard a_k recurrence (4 nu^2 = -4 mu^2, so the a_k are real and
    alternate).  Truncated at the smallest term; at x >= max(30, 10 mu)
    that term is below ~2e-12 everywhere in the supported box.
    """
    nu2x4 = -4.0 * mu * mu
    # The a_k are real here (4 nu^2 = -4 mu^2 is real).  Near the region
    # edge the term magnitudes first hump upward (peak <~ 3 at x = 10 mu)
    # before the asymptotic descent, so locate the global minimum term and
    # truncate there; the omitted tail is of that size.
    terms = [1.0]
    t = 1.0
    for k in range(1, 2 * int(x) + 120):
        t *= (nu2x4 - (2 * k - 1) ** 2) / (8.0 * k * x)
        terms.append(t)
        if abs(t) < 1e-17 or abs(t) > 1e4:
            break
    k_min = min(range(len(terms)), key=lambda i: abs(terms[i]))
    if abs(terms[k_min]) > 1e-11:
        raise RangeError(
            f"asymptotic expansion bottoms out at {abs(terms[k_min]):.2e} "
            f"for mu={mu}, x={x}"
        )
    # sum through the smallest term in extended precision
    s1 = np.clongdouble(1) + np.clongdouble(0) * 1j
    s2 = np.clongdouble(1) + np.clongdouble(0) * 1j
    d1 = np.clongdouble(0) + np.clongdouble(0) * 1j
    d2 = np.clongdouble(0) + np.clongdouble(0) * 1j
    ik = complex(1.0)
    for k in range(1, k_min + 1):
        ik *= 1j
        t1 = np.clongdouble(ik.real) + np.clongdouble(ik.imag) * 1j
        t2 = np.clongdouble(ik.real) - np.clongdouble(ik.imag) * 1j
        ak = np.clongdouble(terms[k])
        s1 = s1 + t1 * ak
        s2 = s2 + t2 * ak
        d1 = d1 - t1 * ak * np.clongdouble(k / x)
        d2 = d2 - t2 * ak * np.clongdouble(k / x)
    S1, S2 = complex(s1), complex(s2)
    S1d, S2d = complex(d1), complex(d2)
    pref = math.sqrt(2.0 / (math.pi * x))
    # e^{i omega} = e^{i(x - pi/4)} e^{mu pi / 2}
    ph = cmath.exp(1j * (x - 0.25 * math.pi))
    ep = math.exp(0.5 * mu * math.pi)
    h1 = pref * ph * ep * S1
    h2 = pref * ep**-1 * S2 / ph
    h1d = pref * ph * ep * (1j * S1 + S1d - S1 / (2.0 * x))
    h2d = pref * (ep**-1 / ph) * (-1j * S2 + S2d - S2 / (2.0 * x))
    return h1, h1d, h2, h2d


def _imag_order_all(mu: float, x: float) -> tuple[complex, complex, complex, complex]:
    """(H1, H1', H2, H2') of order i*mu, routed by region."""
    if x < _asym_edge(mu):
        j, jd = _j_imag_series(mu, x)
        return _hankel_from_j_imag(mu, j, jd)
    return _hankel_asym_imag(mu, x)


# =====================================================================
# public evaluators
# =====================================================================


def bessel_j_pair(order: Order, x: float) -> tuple[complex, complex]:
    """(J_nu(x), dJ_nu/dx) for the given order."""
    x = _check_x(x)
    if order.kind == "real":
        v = complex(_sp.jv(order.mu, x))
        d = complex(_sp.jvp(order.mu, x))
        _check_finite("bessel_j", v, d)
        return v, d
    if x < _asym_edge(order.mu):
        v, d = _j_imag_series(order.mu, x)
    else:
        h1, h1d, h2, h2d = _hankel_asym_imag(order.mu, x)
        v, d = 0.5 * (h1 + h2), 0.5 * (h1d + h2d)
    _check_finite("bessel_j", v, d)
    return v, d


def bessel_j(order: Order, x: float) -> complex:
    """Bessel function J_nu(x); see the module docstring for the regions."""
    return bessel_j_pair(order, x)[0]


def hankel_pair(kind: int, order: Order, x: float) -> tuple[complex, complex]:
    """(H_nu(x), dH_nu/dx) for Hankel kind 1 (outgoing) or 2 (ingoing)."""
    if kind not in (1, 2):
        raise RangeError(f"hankel kind must be 1 or 2, got {kind!r}")
    x = _check_x(x)
    if order.kind == "real":
        try:
            if kind == 1:
                v = complex(_sp.hankel1(order.mu, x))
                d = complex(_sp.h1vp(order.mu, x))
            else:
                v = complex(_sp.hankel2(order.mu, x))
                d = complex(_sp.h2vp(order.mu, x))
        except Exception as exc:  # pragma: no cover - AMOS failures are rare
            raise DegenerateOrderError(
                f"real-order Hankel evaluation failed at nu={order.mu}, x={x}"
            ) from exc
        _check_finite("hankel", v, d)
        return v, d
    h1, h1d, h2, h2d = _imag_order_all(order.mu, x)
    v, d = (h1, h1d) if kind == 1 else (h2, h2d)
    _check_finite("hankel", v, d)
    return v, d


def hankel(kind: int, order: Order, x: float) -> complex:
    """Hankel function H^{(kind)}_nu(x)."""
    return hankel_pair(kind, order, x)[0]


def wronskian_check(order: Order, x: float) -> float:
    """Deviation of the Hankel pair from its exact Wronskian.

    Returns |W (i pi x / 4) + 1| with W = H1' H2 - H1 H2'.  The exact
    cross-product is W = +4i/(pi x) in this (f'g - f g') convention, so a
    correct pair drives the deviation to rounding level.  Used as the
    built-in accuracy monitor: anything above ~1e-8 means digits were
    lost somewhere in the evaluation chain.

    The cross-product is evaluated in cancellation-free equivalent forms.
    The naive product subtraction loses |H|^2 x / 1 digits, which for real
    order at x << mu exceeds double precision even when every factor is
    correctly rounded; the identities below carry the same information:

    * real order: W = 2i (J Y' - J' Y), whose two terms share a sign at
      small x;
    * imaginary order below the asymptotic edge: the package builds the
      pair from J_{i mu}, so W = 4i Im(J' conj(J)) / sinh(mu pi) exactly;
    * imaginary order in the asymptotic region: direct products (the
      factors are O(1) there).
    """
    x = _check_x(x)
    if order.kind == "real":
        bj = float(_sp.jv(order.mu, x))
        bjd = float(_sp.jvp(order.mu, x))
        by = float(_sp.yv(order.mu, x))
        byd = float(_sp.yvp(order.mu, x))
        _check_finite("wronskian_check", complex(bj, by), complex(bjd, byd))
        w = 2j * (bj * byd - bjd * by)
    elif x < _asym_edge(order.mu):
        sj, sjd = _j_imag_series(order.mu, x)
        w = 4j * (sjd * sj.conjugate()).imag / math.sinh(order.mu * math.pi)
    else:
        h1, h1d, h2, h2d = _hankel_asym_imag(order.mu, x)
        w = h1d * h2 - h1 * h2d
    return abs(w * (0.25j * math.pi * x) + 1.0)
