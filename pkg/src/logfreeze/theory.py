"""Closed-form predictions for log-correlated landscapes.

Every analytic prediction used by the samplers and experiments lives here:
moment formulas for the exponential sums, the freezing curve, the
extreme-value densities for the full circle and for mesoscopic arcs, the
sojourn-measure scales and densities (direct and via numerical inversion
of their Mellin transforms), counting thresholds for high points, and the
arithmetic Euler product that enters the zeta predictions.

Scales that grow like a power of the system size are returned on the log
scale throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from .specfun import (
    DomainError,
    EULER_GAMMA,
    PoleError,
    log_barnes_g,
    log_double_gamma,
    primes_up_to,
)

TWO_PI = 2.0 * math.pi

# Reference cumulants of the recentred full-circle maximum variable.
MAX_MEAN_FULL_CIRCLE = -2.0 * EULER_GAMMA
MAX_VARIANCE_FULL_CIRCLE = math.pi**2 / 3.0
MAX_THIRD_CUMULANT_FULL_CIRCLE = -4.0 * float(_sp.zeta(3.0))

# Cumulants of the mesoscopic-arc order-one fluctuation (from the contour
# representation of its generating function).
MESO_MEAN = 3.5 - 2.0 * EULER_GAMMA - math.log(TWO_PI)
MESO_VARIANCE = 4.0 * math.pi**2 / 3.0 - 27.0 / 4.0
MESO_TAIL_SHIFT = 2.0 * EULER_GAMMA + math.log(TWO_PI) - 1.0


def _real_log_gamma(z):
    return _sp.gammaln(z)


@dataclass(frozen=True)
class MomentSpec:
    """Parameters of one moment evaluation: E{Z^k} at inverse temperature beta.

    ``N`` is the matrix dimension, ``L`` the arc length in radians (2 pi for
    the full circle), ``k`` the moment order.
    """

    beta: float
    k: float = 1.0
    N: int = 64
    L: float = TWO_PI

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError("beta must be positive")
        if not 0 < self.L <= TWO_PI + 1e-12:
            raise DomainError("arc length must lie in (0, 2 pi]")
        if self.N < 1:
            raise DomainError("N must be at least 1")
        if not self.k > 0:
            raise DomainError("moment order k must be positive")

    @property
    def full_circle(self) -> bool:
        return abs(self.L - TWO_PI) < 1e-12

    @property
    def n_arc(self) -> float:
        """Mean number of eigenvalues in the arc, N L / 2 pi."""
        return self.N * self.L / TWO_PI


@dataclass(frozen=True)
class TheoryCurve:
    """A tabulated closed-form prediction."""

    abscissa: np.ndarray
    value: np.ndarray
    equation_tag: str

    def __post_init__(self):
        a = np.asarray(self.abscissa, dtype=float)
        v = np.asarray(self.value, dtype=float)
        if a.shape != v.shape:
            raise ValueError("abscissa and value lengths differ")
        if not np.all(np.diff(a) > 0):
            raise ValueError("abscissa must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ValueError("curve values must be finite")


# ---------------------------------------------------------------------------
# Moment formulas
# ---------------------------------------------------------------------------

def z_e_scale(spec: MomentSpec) -> float:
    """log of the typical moment scale.

    Full circle: N^{1+b^2} G^2(1+b) / (G(1+2b) Gamma(1-b^2)).  Mesoscopic
    arcs pick up (2 pi)^{b^2} and replace N by the arc count N L / 2 pi.
    """
    b = spec.beta
    if b >= 1.0:
        raise PoleError("typical moment scale has a pole at beta = 1")
    g_factors = (
        2.0 * log_barnes_g(1.0 + b).real
        - log_barnes_g(1.0 + 2.0 * b).real
        - _real_log_gamma(1.0 - b * b)
    )
    if spec.full_circle:
        return (1.0 + b * b) * math.log(spec.N) + g_factors
    n_arc = spec.n_arc
    return (1.0 + b * b) * math.log(n_arc) + b * b * math.log(TWO_PI) + g_factors


def moment_full_circle(spec: MomentSpec) -> float:
    """log E{Z^k} on the full circle: k log Z_e + log Gamma(1 - k b^2)."""
    kb2 = spec.k * spec.beta**2
    if kb2 >= 1.0:
        raise DomainError(
            "moment order k >= 1/beta^2: the moment leaves the regime where "
            "the closed form holds (scale becomes N^(1+k^2 b^2))"
        )
    return spec.k * z_e_scale(spec) + _real_log_gamma(1.0 - kb2)


def selberg_product(k: int, beta_sq: float) -> float:
    """log of prod_{j=1}^{k} G^2(1-(j-1)b^2) G(1-j b^2) / G(2-(k+j-2) b^2),
    written with Gamma factors; equals the [0,1]^k bulk integral of
    prod |y_r - y_s|^{-2 b^2} times Gamma(1-b^2)^k."""
    total = 0.0
    for j in range(1, k + 1):
        total += (
            2.0 * _real_log_gamma(1.0 - (j - 1) * beta_sq)
            + _real_log_gamma(1.0 - j * beta_sq)
            - _real_log_gamma(2.0 - (k + j - 2) * beta_sq)
        )
    return total


def moment_mesoscopic(spec: MomentSpec) -> float:
    """log E{Z^k} on a mesoscopic arc (integer k below 1/beta^2)."""
    k = int(round(spec.k))
    if abs(k - spec.k) > 1e-9 or k < 1:
        raise DomainError("mesoscopic moments require integer k >= 1")
    b2 = spec.beta**2
    if k * b2 >= 1.0:
        raise DomainError("moment order k >= 1/beta^2 diverges on the arc")
    return k * z_e_scale(spec) + selberg_product(k, b2)


def density_scaled_moment(z, beta: float):
    """Density of z = Z / Z_e in the high-temperature phase.

    P(z) = (1/b^2) z^{-(1+1/b^2)} exp(-z^{-1/b^2}); the CDF is
    exp(-z^{-1/b^2}).
    """
    if not 0.0 < beta < 1.0:
        raise DomainError("the scaled-moment density needs 0 < beta < 1")
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise DomainError("the scaled moment is positive")
    inv = 1.0 / beta**2
    out = inv * z ** -(1.0 + inv) * np.exp(-(z**-inv))
    return float(out) if out.ndim == 0 else out


def cdf_scaled_moment(z, beta: float):
    z = np.asarray(z, dtype=float)
    out = np.exp(-(z ** (-1.0 / beta**2)))
    return float(out) if out.ndim == 0 else out


def lognormal_tail(log_z: float, beta: float, M: int) -> float:
    """Far-tail density of the moment (valid only for Z well above M^2).

    The order-one prefactor that multiplies the lognormal shape is not
    pinned down by the theory; it is set to 1 here.
    """
    if not log_z > 2.0 * math.log(M):
        raise DomainError("the lognormal tail applies only for log Z > 2 log M")
    b2 = beta * beta
    log_m = math.log(M)
    log_density = (
        log_m
        - 0.5 * math.log(4.0 * math.pi * b2 * log_m)
        - log_z
        - log_z**2 / (4.0 * log_m * b2)
    )
    return math.exp(log_density)


# ---------------------------------------------------------------------------
# The Laplace functional g and the full-circle extreme-value law
# ---------------------------------------------------------------------------

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _adaptive_panels(f, edges, tol=1e-13):
    """Sum of adaptive Gauss-Legendre panels of a vectorized integrand."""
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        prev = None
        for n in (24, 48, 96, 192, 384, 768, 1536):
            x, w = _leggauss(n)
            t = 0.5 * (hi - lo) * (x + 1.0) + lo
            val = f(t) @ w * 0.5 * (hi - lo)
            if prev is not None and np.all(np.abs(val - prev) <= tol * (1.0 + np.abs(val))):
                break
            prev = val
        total = total + val
    return total


def _exp_sum_integral(c: float, b2: float) -> float:
    """int_0^oo exp(-t - c t^{-b2}) dt via the substitution t = e^s."""
    if c == 0.0:
        return 1.0

    def integrand(s):
        with np.errstate(over="ignore"):
            expo = s - np.exp(s) - c * np.exp(-b2 * s)
        return np.exp(np.clip(expo, -745.0, 50.0))

    # the integrand is bounded by e^s, so truncating at -45 is always safe;
    # on the right e^s kills everything past log(45)+2
    edges = np.linspace(-45.0, math.log(45.0) + 2.0, 18).tolist()
    return float(_adaptive_panels(integrand, edges))


def g_beta(y: float, beta: float) -> float:
    """Laplace functional g_beta(y) = int_0^oo exp(-t - e^{beta y} t^{-beta^2}) dt.

    Defined by the integral for 0 < beta <= 1; parameters above 1 map to
    1/beta through the duality of the underlying series.  At beta = 1 it
    collapses to 2 e^{y/2} K_1(2 e^{y/2}).
    """
    if not beta > 0:
        raise DomainError("g_beta needs beta > 0")
    if beta > 1.0:
        beta = 1.0 / beta
    c = math.exp(beta * y)
    return _exp_sum_integral(c, beta * beta)


def pathintegral_rhs(p: float, beta: float, variance: float) -> float:
    """Laplace functional of the regularized exponential sum at argument p.

    Evaluates int_0^oo exp(-t - p z_e t^{-b^2}) dt with
    z_e = e^{b^2 variance / 2} / Gamma(1 - b^2).
    """
    if p < 0:
        raise DomainError("p must be nonnegative")
    if not 0.0 < beta < 1.0:
        raise DomainError("pathintegral_rhs needs 0 < beta < 1")
    if not variance > 0:
        raise DomainError("variance must be positive")
    b2 = beta * beta
    z_e = math.exp(b2 * variance / 2.0 - _real_log_gamma(1.0 - b2))
    return _exp_sum_integral(p * z_e, b2)


def pdf_max_full_circle(x):
    """Density of the recentred full-circle maximum: 2 e^x K_0(2 e^{x/2})."""
    x = np.asarray(x, dtype=float)
    w = 2.0 * np.exp(x / 2.0)
    with np.errstate(under="ignore"):
        out = 2.0 * np.exp(np.minimum(x, 700.0)) * _sp.k0(np.minimum(w, 750.0))
    out = np.where(w > 750.0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def cdf_max_full_circle(x):
    """CDF of the recentred full-circle maximum, 1 - 2 e^{x/2} K_1(2 e^{x/2})."""
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    small = x < -8.0
    xs = x[small]
    out[small] = -np.exp(xs) * (xs - 1.0 + 2.0 * EULER_GAMMA) - np.exp(2 * xs) * (
        0.5 * xs - 1.25 + EULER_GAMMA
    )
    xl = x[~small]
    w = 2.0 * np.exp(np.minimum(xl, 700.0) / 2.0)
    with np.errstate(under="ignore"):
        out[~small] = np.where(w > 750.0, 1.0, 1.0 - np.minimum(w, 750.0) * _sp.k1(np.minimum(w, 750.0)))
    return float(out[0]) if scalar else out


def cdf_asymptotics_full_circle(x):
    """Two-term left-tail expansion of the survival function g of the
    full-circle maximum: g(x) = 1 + e^x (x - 1 + 2 gamma_E)."""
    x = np.asarray(x, dtype=float)
    if np.any(x >= -3.0):
        raise DomainError("the tail expansion is stated for x < -3")
    out = 1.0 + np.exp(x) * (x - 1.0 + 2.0 * EULER_GAMMA)
    return float(out) if out.ndim == 0 else out


def _psi_over_gamma(w):
    """psi(w)/Gamma(w), finite at the non-positive integers."""
    scalar = np.ndim(w) == 0
    w = np.atleast_1d(np.asarray(w, dtype=float))
    out = np.empty_like(w)
    left = w < 0.5
    wl = w[left]
    out[left] = _sp.gamma(1.0 - wl) * (
        _sp.digamma(1.0 - wl) * np.sin(math.pi * wl) / math.pi - np.cos(math.pi * wl)
    )
    wr = w[~left]
    out[~left] = _sp.digamma(wr) * _sp.rgamma(wr)
    return float(out[0]) if scalar else out


def clm_density(phi, beta: float):
    """Density of the frozen-phase free-energy deviation (beta > 1).

    Fourier form for moderate arguments,

        P(phi) = (1/2 pi) int e^{-i s phi} Gamma^2(1+is)/Gamma(1+is/beta) ds,

    switching to the exponential series (with digamma corrections) in the
    far left tail where the oscillatory integral loses accuracy.
    """
    if not beta > 1.0:
        raise DomainError("the frozen-phase density needs beta > 1")
    phi_arr = np.atleast_1d(np.asarray(phi, dtype=float))
    out = np.empty_like(phi_arr)

    tail = phi_arr < -10.0
    if np.any(tail):
        pt = phi_arr[tail]
        acc = np.zeros_like(pt)
        for n in range(1, 40):
            w = 1.0 - n / beta
            pref = np.exp(n * pt - _real_log_gamma(n + 1) - _real_log_gamma(n))
            bracket = (n * pt + 2.0 - 2.0 * n * _sp.digamma(n + 1)) * _sp.rgamma(
                w
            ) + (n / beta) * _psi_over_gamma(w)
            term = -pref * bracket
            acc += term
            if np.all(np.abs(term) < 1e-18):
                break
        out[tail] = acc

    mid = ~tail
    if np.any(mid):
        pm = phi_arr[mid]
        # the integrand decays like exp(-pi (1 - 1/(2 beta)) |s|)
        rate = math.pi * (1.0 - 0.5 / beta)
        s_max = 42.0 / rate

        def integrand(s):
            ls = (
                2.0 * _sp.loggamma(1.0 + 1j * s)
                - _sp.loggamma(1.0 + 1j * s / beta)
            )
            kernel = np.exp(ls[None, :] - 1j * np.outer(pm, s))
            return kernel.real

        edges = np.linspace(0.0, s_max, 14).tolist()
        out[mid] = _adaptive_panels(integrand, edges) / math.pi

    if np.ndim(phi) == 0:
        return float(out[0])
    return out


# ---------------------------------------------------------------------------
# Mesoscopic-arc extreme-value law (contour representation)
# ---------------------------------------------------------------------------

_LOG_G_5_HALF = log_barnes_g(2.5).real


def _meso_log_m(s):
    """log M(s) for the mesoscopic contour kernel."""
    s = np.asarray(s, dtype=complex)
    return (
        (2.0 * s * s + s - 2.0) * math.log(2.0)
        - 2.0 * _LOG_G_5_HALF
        - (s - 1.0) * math.log(math.pi)
        - _sp.loggamma(s)
        - _sp.loggamma(s + 2.0)
        + 2.0 * (log_barnes_g(s + 1.5) - log_barnes_g(s))
    )


def _circle_sum(f, center: complex, radius: float, n: int = 256) -> complex:
    """(1/2 pi i) oint f(s) ds around a small circle, by the trapezoid rule."""
    phi = (np.arange(n) + 0.5) * (TWO_PI / n)
    s = center + radius * np.exp(1j * phi)
    return np.sum(f(s) * (s - center)) / n


def _vertical_integral(f, s0: float, omega0: float = 8.0, tol: float = 1e-15):
    """(1/2 pi) int_{-Om}^{Om} f(s0 + i w) dw exploiting conjugate symmetry.

    The truncation Om grows until the integrand has decayed below 1e-16 of
    its peak; raises if no such window is found.
    """
    omega = omega0
    peak = np.max(np.abs(f(np.array([s0 + 0.0j]))))
    for _ in range(40):
        edge = np.max(np.abs(f(np.array([s0 + 1j * omega]))))
        if edge <= 1e-16 * max(peak, 1e-300):
            break
        omega *= 1.4
    else:
        raise DomainError("contour integrand fails to decay on the vertical line")

    def integrand(w):
        return f(s0 + 1j * w).real

    edges = np.linspace(0.0, omega, 16).tolist()
    return 2.0 * _adaptive_panels(integrand, edges, tol=tol) / TWO_PI


def _residue_series(f, rightmost: float, y: float, kmax: int = 8) -> float:
    """Sum of residue-circle terms over poles rightmost, rightmost-1, ...

    The kernels grow super-exponentially to the left, so the expansion is
    asymptotic: terms are accumulated only while they keep shrinking
    (smallest-term truncation), and the circle radius shrinks with |y| to
    limit rounding amplification e^{|y| r}.
    """
    radius = min(0.35, 6.0 / max(abs(y), 1.0))
    total = 0.0
    prev = math.inf
    for k in range(kmax):
        term = _circle_sum(f, rightmost - k, radius).real
        if abs(term) >= prev:
            break
        total += term
        prev = abs(term)
        if prev < 1e-17 * max(1.0, abs(total)):
            break
    return total


def mesoscopic_g(y: float) -> float:
    """Survival function of the order-one mesoscopic maximum fluctuation."""
    if y < -8.0:

        def f(s, _y=y):
            return np.exp(-s * _y + _meso_log_m(s)) * _sp.gamma(s - 1.0)

        return math.exp(y) * _residue_series(f, 1.0, y)

    def f(s, _y=y):
        return np.exp(-s * _y + _meso_log_m(s)) * _sp.gamma(s - 1.0)

    return math.exp(y) * _vertical_integral(f, 1.5)


def mesoscopic_density(y):
    """Density -g'(y) of the mesoscopic fluctuation, via the contour with
    kernel M(s) Gamma(s)."""
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.empty_like(ys)
    for i, yv in enumerate(ys):
        if yv < -8.0:

            def f(s, _y=yv):
                return np.exp(-s * _y + _meso_log_m(s)) * _sp.gamma(s)

            out[i] = math.exp(yv) * _residue_series(f, 0.0, yv)
        else:

            def f(s, _y=yv):
                return np.exp(-s * _y + _meso_log_m(s)) * _sp.gamma(s)

            out[i] = math.exp(yv) * _vertical_integral(f, 1.5)
    if np.ndim(y) == 0:
        return float(out[0])
    return out


# ---------------------------------------------------------------------------
# Sojourn measures of high points
# ---------------------------------------------------------------------------

def mu_typical(x: float, N: int, L: float = TWO_PI) -> float:
    """log of the typical high-point measure scale mu_e(x).

    mu_e(x) = N^{-x^2} sqrt(1/(pi log N)) G^2(1+x)/(2x G(1+2x) Gamma(1-x^2));
    on a mesoscopic arc N is replaced by the arc count and the scale picks
    up (2 pi)^{-x^2}.
    """
    if not 0.0 < x < 1.0:
        raise DomainError("the sojourn scale is defined for 0 < x < 1")
    full = abs(L - TWO_PI) < 1e-12
    n_eff = N if full else N * L / TWO_PI
    if n_eff < 8:
        raise DomainError("need at least ~8 eigenvalues in the window")
    out = (
        -x * x * math.log(n_eff)
        - 0.5 * math.log(math.pi * math.log(n_eff))
        + 2.0 * log_barnes_g(1.0 + x).real
        - math.log(2.0 * x)
        - log_barnes_g(1.0 + 2.0 * x).real
        - _real_log_gamma(1.0 - x * x)
    )
    if not full:
        out -= x * x * math.log(TWO_PI)
    return out


def sojourn_mean_log(x: float, N: int, L: float = TWO_PI) -> float:
    """log E{mu} = log mu_e(x) + log Gamma(1-x^2)."""
    return mu_typical(x, N, L) + _real_log_gamma(1.0 - x * x)


def density_sojourn_full_circle(xi, x: float):
    """Density of xi = mu/mu_e on the full circle:
    (1/x^2) xi^{-1-1/x^2} exp(-xi^{-1/x^2})."""
    if not 0.0 < x < 1.0:
        raise DomainError("need 0 < x < 1")
    xi = np.asarray(xi, dtype=float)
    if np.any(xi <= 0):
        raise DomainError("xi must be positive")
    inv = 1.0 / (x * x)
    with np.errstate(under="ignore"):
        out = inv * xi ** -(1.0 + inv) * np.exp(-(xi**-inv))
    return float(out) if out.ndim == 0 else out


def cdf_sojourn_full_circle(xi, x: float):
    xi = np.asarray(xi, dtype=float)
    with np.errstate(under="ignore"):
        out = np.exp(-(xi ** (-1.0 / (x * x))))
    return float(out) if out.ndim == 0 else out


def mellin_sojourn(s, x: float):
    """Mellin transform M_x(s) = E{xi^{1-s}} of the mesoscopic sojourn ratio.

    Expressed through the double Gamma function; normalized so that
    M_x(1) = 1 exactly.  Valid to the right of the pole chain starting at
    s = 1 - 1/x^2.
    """
    if not 0.0 < x < 1.0:
        raise DomainError("need 0 < x < 1")
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    gam_arg = 1.0 + x * x * (s_arr - 1.0)
    bad = (np.abs(gam_arg.imag) < 1e-9) & (gam_arg.real < 0.5) & (
        np.abs(gam_arg.real - np.round(gam_arg.real)) < 1e-9
    )
    if np.any(bad):
        raise PoleError("mellin_sojourn evaluated on its pole chain")

    def gx(z):
        return log_double_gamma(z, x)

    xs = x * s_arr
    log_a = (
        (s_arr - 1.0) * (2.0 + x * x * (2.0 * s_arr + 1.0)) * math.log(2.0)
        + (1.0 - s_arr) * math.log(math.pi)
        + 2.0 * gx(1.0 / x + x)
        + gx(2.0 * x + 2.0 / x)
        - gx(1.5 * x + 1.0 / x)
        - gx(1.5 / x + x)
        - gx(1.5 * x + 1.5 / x)
    )
    log_m = (
        log_a
        + _sp.loggamma(gam_arg)
        + gx(x / 2.0 + 1.0 / x + xs)
        + gx(1.5 / x + xs)
        + gx(x / 2.0 + 1.5 / x + xs)
        - gx(x + 2.0 / x + xs)
        - 2.0 * gx(1.0 / x + xs)
    )
    out = np.exp(log_m)
    if np.ndim(s) == 0:
        return complex(out[0])
    return out


class SojournInverter:
    """Numerical Mellin inversion of the mesoscopic sojourn density.

    Precomputes the transform on a vertical line (abscissa half a unit to
    the right of the rightmost pole) so that the density, tail masses and
    tail moments can all be read off the same cached contour values.
    """

    def __init__(self, x: float, tol: float = 1e-11):
        if not 0.0 < x < 1.0:
            raise DomainError("need 0 < x < 1")
        self.x = x
        self.s0 = 1.0 - 1.0 / x**2 + 0.5
        # locate the truncation, then lay down a converged composite rule
        omega = 8.0
        peak = abs(mellin_sojourn(self.s0, x))
        for _ in range(60):
            if abs(mellin_sojourn(self.s0 + 1j * omega, x)) <= 1e-16 * peak:
                break
            omega *= 1.3
        else:
            raise DomainError("sojourn transform fails to decay on the contour")
        self.omega = omega
        n = 512
        prev = None
        while True:
            w, wt = _leggauss_composite(0.0, omega, n)
            vals = mellin_sojourn(self.s0 + 1j * w, x)
            probe = _test_inversion(vals, wt, w, self.s0, (0.7, 1.0, 3.0))
            if (prev is not None and np.max(np.abs(probe - prev)) < tol) or n >= 16384:
                break
            prev = probe
            n *= 2
        self.nodes, self.weights, self.m_vals = w, wt, vals

    def density(self, xi):
        xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
        if np.any(xi_arr <= 0):
            raise DomainError("xi must be positive")
        out = np.empty_like(xi_arr)
        body = xi_arr >= 0.5
        if np.any(body):
            out[body] = self._invert(self.s0, self.nodes, self.weights, self.m_vals,
                                     xi_arr[body])
        # in the lognormal-type left tail the fixed line loses all accuracy
        # to cancellation: move the abscissa near the Gaussian saddle of
        # 2^{2 x^2 s^2} xi^s, where the integrand peaks with little phase
        small = xi_arr[~body]
        if len(small):
            saddles = np.maximum(self.s0, -np.log(small) / (4.0 * self.x**2 * math.log(2.0)))
            buckets = np.ceil(np.log(np.maximum(saddles, 1.0)) / math.log(1.25)).astype(int)
            vals = np.empty_like(small)
            for b in np.unique(buckets):
                line = self._saddle_line(int(b))
                sel = buckets == b
                vals[sel] = self._invert(*line, small[sel])
            out[~body] = vals
        if np.ndim(xi) == 0:
            return float(out[0])
        return out

    @staticmethod
    def _invert(s0, nodes, weights, m_vals, xi):
        kernel = np.exp(np.outer(np.log(xi), s0 + 1j * nodes))
        integral = (kernel * m_vals[None, :]) @ weights
        return (integral.real / math.pi) * xi**-2.0

    def _saddle_line(self, bucket: int):
        if not hasattr(self, "_lines"):
            self._lines = {}
        if bucket not in self._lines:
            c = 1.25**bucket
            omega = 8.0
            peak = abs(mellin_sojourn(c, self.x))
            for _ in range(60):
                if abs(mellin_sojourn(c + 1j * omega, self.x)) <= 1e-16 * peak:
                    break
                omega *= 1.3
            w, wt = _leggauss_composite(0.0, omega, 4096)
            self._lines[bucket] = (c, w, wt, mellin_sojourn(c + 1j * w, self.x))
        return self._lines[bucket]

    def tail_moment(self, lo: float, power: float = 0.0) -> float:
        """int_lo^oo xi^power P(xi) dxi, on the cached contour.

        Interchanging the xi integral with the contour gives the kernel
        lo^{s - 1 + power} / (1 - power - s); valid while the denominator
        stays to the right of the contour (power < 1 - s0)."""
        if power >= 1.0 - self.s0:
            raise DomainError("tail moment diverges on this contour")
        s = self.s0 + 1j * self.nodes
        kernel = np.exp((s - 1.0 + power) * math.log(lo)) / (1.0 - power - s)
        return float(((kernel * self.m_vals) @ self.weights).real / math.pi)

    def tail_mass(self, lo: float) -> float:
        return self.tail_moment(lo, 0.0)


def _leggauss_composite(lo, hi, n, panels=16):
    edges = np.linspace(lo, hi, panels + 1)
    xs, ws = [], []
    x, w = _leggauss(max(8, n // panels))
    for a, b in zip(edges[:-1], edges[1:]):
        xs.append(0.5 * (b - a) * (x + 1.0) + a)
        ws.append(0.5 * (b - a) * w)
    return np.concatenate(xs), np.concatenate(ws)


def _test_inversion(m_vals, weights, nodes, s0, xi_probe):
    out = []
    for xi in xi_probe:
        kern = np.exp((s0 + 1j * nodes) * math.log(xi))
        out.append((kern * m_vals) @ weights)
    return np.array([v.real for v in out])


def density_sojourn_mesoscopic(xi, x: float):
    """Density of the mesoscopic sojourn ratio by Mellin inversion."""
    return SojournInverter(x).density(xi)


# ---------------------------------------------------------------------------
# Counting of high points and the extreme threshold
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CountingScale:
    log_typical: float
    log_mean: float


def counting_typical(x: float, M: int) -> CountingScale:
    """Typical and mean counting scales for points above x log M.

    N_t(x) = M^{1-x^2/4} / (x sqrt(pi log M) Gamma(1-x^2/4)); the ensemble
    mean is larger by the factor Gamma(1-x^2/4).
    """
    if not 0.0 < x < 2.0:
        raise DomainError("counting scale defined for 0 < x < 2")
    if M < 2:
        raise DomainError("need M >= 2")
    log_m = math.log(M)
    lt = (
        (1.0 - x * x / 4.0) * log_m
        - math.log(x)
        - 0.5 * math.log(math.pi * log_m)
        - _real_log_gamma(1.0 - x * x / 4.0)
    )
    return CountingScale(lt, lt + _real_log_gamma(1.0 - x * x / 4.0))


def density_counting_ratio(n, x: float):
    """Density of the ratio N_>(x)/N_t(x):
    (4/x^2) n^{-1-4/x^2} exp(-n^{-4/x^2})."""
    if not 0.0 < x < 2.0:
        raise DomainError("need 0 < x < 2")
    n = np.asarray(n, dtype=float)
    inv = 4.0 / (x * x)
    with np.errstate(under="ignore"):
        out = inv * n ** -(1.0 + inv) * np.exp(-(n**-inv))
    return float(out) if out.ndim == 0 else out


def threshold_extreme(M: int, c: float = 1.5) -> float:
    """Extreme-value threshold exponent x_+ = 2 - c log log M / log M.

    c = 3/2 for log-correlated sequences; c = 1/2 would be the short-range
    value.
    """
    if M < 16:
        raise DomainError("threshold asymptotics need M >= 16")
    log_m = math.log(M)
    return 2.0 - c * math.log(log_m) / log_m


def recentering_shift(n_arc: float, c: float = 1.5) -> float:
    """Centering constant of the minimum: -2 log N_L + c log log N_L."""
    if n_arc < math.e:
        raise DomainError("need log log N_L defined (N_L > e)")
    return -2.0 * math.log(n_arc) + c * math.log(math.log(n_arc))


def freezing_curve(beta):
    """Minus the limiting normalized free energy: beta + 1/beta capped at 2."""
    beta = np.asarray(beta, dtype=float)
    if np.any(beta <= 0):
        raise DomainError("beta must be positive")
    out = np.where(beta <= 1.0, beta + 1.0 / beta, 2.0)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Arithmetic Euler factor
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ArithmeticFactor:
    value: float
    tail_estimate: float
    converged: bool
    prime_limit: int


def arithmetic_factor(x: float, prime_limit: int, tol: float = 1e-6) -> ArithmeticFactor:
    """Truncated Euler product a(x) over primes up to prime_limit.

    Each factor is (1-1/p)^{x^2} * 2F1(x, x; 1; 1/p); factors approach
    1 - (x(x-1)/2)^2 / p^2, which drives the reported tail estimate.
    """
    if x < 0:
        raise DomainError("x must be nonnegative")
    if prime_limit < 100:
        raise DomainError("prime limit must be at least 100")
    if x == 0.0 or x == 1.0:
        return ArithmeticFactor(1.0, 0.0, True, prime_limit)
    p = primes_up_to(prime_limit).primes.astype(float)
    inv_p = 1.0 / p
    # hypergeometric sum over m with recursive term ratio ((x+m)/(m+1))^2 / p
    total = np.ones_like(p)
    term = np.ones_like(p)
    m = 0
    while True:
        term = term * ((x + m) / (m + 1.0)) ** 2 * inv_p
        total += term
        m += 1
        if np.max(term / total) < 1e-18 or m > 400:
            break
    log_a = float(np.sum(x * x * np.log1p(-inv_p) + np.log(total)))
    # remainder of sum_p c2/p^2 with c2 = -(x(x-1)/2)^2, via the usual
    # prime-density integral approximation
    c2 = -((x * (x - 1.0) / 2.0) ** 2)
    tail = c2 / (prime_limit * math.log(prime_limit))
    return ArithmeticFactor(math.exp(log_a), tail, abs(tail) < tol, prime_limit)


# ---------------------------------------------------------------------------
# Curve tabulation (used by the CLI)
# ---------------------------------------------------------------------------

def _grid(lo, hi, n):
    return np.linspace(lo, hi, n)


def tabulate_curve(name: str, **params) -> TheoryCurve:
    """Tabulate a named closed-form curve on a sensible default grid."""
    if name == "pdf-max-full-circle":
        xs = _grid(params.get("lo", -12.0), params.get("hi", 8.0), params.get("n", 401))
        return TheoryCurve(xs, pdf_max_full_circle(xs), "max-density-full-circle")
    if name == "cdf-max-full-circle":
        xs = _grid(params.get("lo", -12.0), params.get("hi", 8.0), params.get("n", 401))
        return TheoryCurve(xs, cdf_max_full_circle(xs), "max-cdf-full-circle")
    if name == "freezing-curve":
        xs = _grid(params.get("lo", 0.1), params.get("hi", 3.0), params.get("n", 291))
        return TheoryCurve(xs, freezing_curve(xs), "freezing-curve")
    if name == "mesoscopic-g":
        xs = _grid(params.get("lo", -10.0), params.get("hi", 6.0), params.get("n", 161))
        vals = np.array([mesoscopic_g(v) for v in xs])
        return TheoryCurve(xs, vals, "mesoscopic-max-survival")
    if name == "mesoscopic-density":
        xs = _grid(params.get("lo", -10.0), params.get("hi", 6.0), params.get("n", 161))
        return TheoryCurve(xs, mesoscopic_density(xs), "mesoscopic-max-density")
    if name == "sojourn-density-full-circle":
        x = params.get("x", 0.5)
        xs = np.geomspace(params.get("lo", 0.05), params.get("hi", 60.0), params.get("n", 201))
        return TheoryCurve(xs, density_sojourn_full_circle(xs, x), "sojourn-density-full-circle")
    if name == "sojourn-density-mesoscopic":
        x = params.get("x", 0.5)
        xs = np.geomspace(params.get("lo", 0.5), params.get("hi", 60.0), params.get("n", 201))
        return TheoryCurve(xs, SojournInverter(x).density(xs), "sojourn-density-mesoscopic")
    if name == "clm-density":
        beta = params.get("beta", 2.0)
        xs = _grid(params.get("lo", -14.0), params.get("hi", 8.0), params.get("n", 221))
        return TheoryCurve(xs, clm_density(xs, beta), "frozen-free-energy-density")
    if name == "counting-typical":
        M = int(params.get("M", 4096))
        xs = _grid(params.get("lo", 0.05), params.get("hi", 1.95), params.get("n", 191))
        vals = np.array([counting_typical(v, M).log_typical for v in xs])
        return TheoryCurve(xs, vals, "high-point-counting-scale")
    raise DomainError(f"unknown theory curve '{name}'")


CURVE_NAMES = (
    "pdf-max-full-circle",
    "cdf-max-full-circle",
    "freezing-curve",
    "mesoscopic-g",
    "mesoscopic-density",
    "sojourn-density-full-circle",
    "sojourn-density-mesoscopic",
    "clm-density",
    "counting-typical",
)
