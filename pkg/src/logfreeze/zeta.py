"""Riemann zeta on and near the critical line at desk-scale heights.

Pointwise |zeta(1/2+it)| through the Hardy Z function: an Euler-Maclaurin
path below t = 100 and the Riemann-Siegel main sum with correction terms
above.  On top of that sit window scans for maxima, window partition
sums, the corresponding freezing statistic, the high-value measure, and
the prime-sum check of the two-point correlation of Re log zeta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from . import theory
from .specfun import DomainError, PoleError, primes_up_to

TWO_PI = 2.0 * math.pi
_RS_SWITCH = 100.0
_T_MAX = 1.0e9


@dataclass(frozen=True)
class CriticalPoint:
    """|zeta| and Hardy Z at one height on the critical line."""

    t: float
    z_value: float
    zeta_abs: float


@dataclass(frozen=True)
class WindowRecord:
    """Maximum of |zeta(1/2+it)| over one window [T, T+L]."""

    T: float
    L: float
    zeta_max: float
    argmax_t: float
    sigma: float


def riemann_siegel_theta(t):
    """Phase theta(t) of the Hardy Z rotation, by its large-t expansion.

    Good to ~1e-10 absolute for t >= 100 and ~3e-12 above t >= 10.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 10.0):
        raise DomainError("theta expansion needs t >= 10")
    out = (
        0.5 * t_arr * np.log(t_arr / TWO_PI)
        - 0.5 * t_arr
        - math.pi / 8.0
        + 1.0 / (48.0 * t_arr)
        + 7.0 / (5760.0 * t_arr**3)
        + 31.0 / (80640.0 * t_arr**5)
        + 127.0 / (430080.0 * t_arr**7)
    )
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Riemann-Siegel correction terms
# ---------------------------------------------------------------------------
#
# The remainder after the main sum is expanded in powers of
# tau^{-1} = (t/2pi)^{-1/2} with coefficients C_j(p) built from the entire
# function Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p) and its
# derivatives, p being the fractional part of tau.  Derivatives are taken
# spectrally (FFT around a circle in the complex plane, where Psi is
# analytic) and each C_j is cached as a Chebyshev fit on [0, 1].

_PSI_RADIUS = 0.93
_CHEB_DEGREE = 100


def _psi(z):
    return np.cos(TWO_PI * (z * z - z - 0.0625)) / np.cos(TWO_PI * z)


def _psi_derivatives(p: np.ndarray, kmax: int) -> np.ndarray:
    """Psi^(k)(p) for k = 0..kmax at real points p, shape (kmax+1, len(p))."""
    n = 512
    phi = TWO_PI * np.arange(n) / n
    ring = _PSI_RADIUS * np.exp(1j * phi)
    vals = _psi(p[:, None] + ring[None, :])
    coef = np.fft.fft(vals, axis=1) / n  # coef[:, k] = a_k r^k e^{...}
    ks = np.arange(kmax + 1)
    fact = _sp.factorial(ks)
    out = (coef[:, : kmax + 1] / _PSI_RADIUS**ks[None, :] * fact[None, :]).T
    return out.real


def _build_rs_coefficients():
    nodes = 0.5 * (1.0 + np.cos(np.pi * np.arange(_CHEB_DEGREE + 1) / _CHEB_DEGREE))
    d = _psi_derivatives(nodes, 12)
    pi2 = math.pi**2
    c = np.empty((5, len(nodes)))
    c[0] = d[0]
    c[1] = -d[3] / (96.0 * pi2)
    c[2] = d[2] / (64.0 * pi2) + d[6] / (18432.0 * pi2**2)
    c[3] = -d[1] / (64.0 * pi2) - d[5] / (3840.0 * pi2**2) - d[9] / (5308416.0 * pi2**3)
    c[4] = (
        d[0] / (128.0 * pi2)
        + 19.0 * d[4] / (24576.0 * pi2**2)
        + 11.0 * d[8] / (5898240.0 * pi2**3)
        + d[12] / (2038431744.0 * pi2**4)
    )
    x = 2.0 * nodes - 1.0
    return [np.polynomial.chebyshev.chebfit(x, c[j], _CHEB_DEGREE - 2) for j in range(5)]


_RS_CHEB: list[np.ndarray] | None = None


def _rs_correction(tau: np.ndarray, parity: np.ndarray, p: np.ndarray) -> np.ndarray:
    global _RS_CHEB
    if _RS_CHEB is None:
        _RS_CHEB = _build_rs_coefficients()
    x = 2.0 * p - 1.0
    acc = np.zeros_like(tau)
    inv = 1.0
    for cheb in _RS_CHEB:
        acc = acc + np.polynomial.chebyshev.chebval(x, cheb) * inv
        inv = inv / tau
    return parity * acc / np.sqrt(tau)


def hardy_z_grid(t: np.ndarray) -> np.ndarray:
    """Hardy Z(t) on an array of heights via the Riemann-Siegel formula.

    Requires t >= 100 throughout; the heights in one call should be close
    in scale (the main sum runs to the largest truncation among them).
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < _RS_SWITCH):
        raise DomainError("Riemann-Siegel path requires t >= 100")
    if np.any(t > _T_MAX):
        raise DomainError("heights beyond 1e9 are out of the validated range")
    tau = np.sqrt(t / TWO_PI)
    m = np.floor(tau).astype(np.int64)
    theta = riemann_siegel_theta(t)
    z = np.zeros_like(t)
    m_max = int(m.max())
    block = max(1, 2**22 // max(len(t), 1))
    for start in range(1, m_max + 1, block):
        ns = np.arange(start, min(start + block, m_max + 1), dtype=float)
        phases = theta[:, None] - t[:, None] * np.log(ns)[None, :]
        contrib = np.cos(phases) / np.sqrt(ns)[None, :]
        contrib[ns[None, :] > m[:, None]] = 0.0
        z += 2.0 * contrib.sum(axis=1)
    parity = np.where(m % 2 == 0, -1.0, 1.0)  # (-1)^{m+1}
    z += _rs_correction(tau, parity, tau - m)
    return z


_BERNOULLI = (
    1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0,
    -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0, 43867.0 / 798.0,
    -174611.0 / 330.0, 854513.0 / 138.0, -236364091.0 / 2730.0,
)


def euler_maclaurin_zeta(s: complex) -> complex:
    """zeta(s) for Re(s) > 0, s != 1, |Im s| <= 1e5, to ~1e-12 relative."""
    s = complex(s)
    if s == 1.0:
        raise PoleError("zeta has its pole at s = 1")
    if s.real <= 0.0:
        raise DomainError("Euler-Maclaurin path needs Re(s) > 0")
    if abs(s.imag) > 1.0e5:
        raise DomainError("Euler-Maclaurin path limited to |Im s| <= 1e5")
    n_cut = int(max(24, math.ceil(1.2 * abs(s.imag)) + 24))
    ns = np.arange(1, n_cut, dtype=float)
    total = complex(np.sum(np.exp(-s * np.log(ns))))
    big_n = float(n_cut)
    log_n = math.log(big_n)
    n_pow = complex(np.exp(-s * log_n))  # N^{-s}
    total += 0.5 * n_pow
    total += big_n * n_pow / (s - 1.0)
    # tail: sum_k B_{2k}/(2k)! * (s)_{2k-1} * N^{-s-2k+1}
    poch = s  # (s)_1
    fact = 1.0
    power = n_pow * big_n  # N^{1-s}
    for k, b in enumerate(_BERNOULLI, start=1):
        fact *= (2 * k - 1) * (2 * k)
        power = power / (big_n * big_n)
        total += b / fact * poch * power
        poch = poch * (s + 2 * k - 1) * (s + 2 * k)
    return total


def zeta_half_line(t: float) -> CriticalPoint:
    """|zeta(1/2+it)| and Z(t) for 10 <= t <= 1e9.

    Below t = 100 the Euler-Maclaurin sum is used; above it the
    Riemann-Siegel formula with correction terms (absolute error budget
    1e-6, in practice far better at these heights).
    """
    if not 10.0 <= t <= _T_MAX:
        raise DomainError("zeta_half_line supports 10 <= t <= 1e9")
    if t < _RS_SWITCH:
        val = euler_maclaurin_zeta(complex(0.5, t))
        z = complex(np.exp(1j * riemann_siegel_theta(t))) * val
        return CriticalPoint(t, float(z.real), abs(val))
    z = float(hardy_z_grid(np.array([t]))[0])
    return CriticalPoint(t, z, abs(z))


# ---------------------------------------------------------------------------
# Window statistics
# ---------------------------------------------------------------------------

def zero_density(T: float) -> float:
    """Mean density of critical-line zeros near height T."""
    return math.log(T / TWO_PI) / TWO_PI


def default_points_per_unit(T: float, oversample: int = 16) -> int:
    return int(math.ceil(oversample * zero_density(T)))


def _window_grid(T: float, L: float, points_per_unit: int) -> np.ndarray:
    if not 0.0 < L <= TWO_PI:
        raise DomainError("window length must lie in (0, 2 pi]")
    if points_per_unit < 8 * zero_density(T):
        raise DomainError("need at least 8 grid points per zero spacing")
    n = max(8, int(math.ceil(L * points_per_unit)))
    return T + (np.arange(n) + 0.5) * (L / n)


def _abs_zeta_grid(ts: np.ndarray) -> np.ndarray:
    """|zeta| on a grid: Riemann-Siegel above t = 100, pointwise
    Euler-Maclaurin below (low windows are short, so the loop is cheap)."""
    if ts[0] >= _RS_SWITCH:
        return np.abs(hardy_z_grid(ts))
    return np.array([abs(euler_maclaurin_zeta(complex(0.5, t))) for t in ts])


def scan_window_max(T: float, L: float, points_per_unit: int | None = None) -> WindowRecord:
    """Grid scan of |zeta| over [T, T+L] with parabolic refinement."""
    if points_per_unit is None:
        points_per_unit = default_points_per_unit(T)
    ts = _window_grid(T, L, points_per_unit)
    absz = _abs_zeta_grid(ts)
    j = int(np.argmax(absz))
    delta, refined = 0.0, float(absz[j])
    if 0 < j < len(ts) - 1:
        vm, v0, vp = absz[j - 1], absz[j], absz[j + 1]
        denom = vm - 2.0 * v0 + vp
        if denom < 0:
            delta = 0.5 * (vm - vp) / denom
            refined = float(v0 - 0.25 * (vm - vp) * delta)
    argmax_t = float(ts[j] + delta * (ts[1] - ts[0]))
    zmax = max(refined, float(absz[j]))
    return WindowRecord(T, L, zmax, argmax_t, sigma_statistic(T, zmax))


def sigma_statistic(T: float, zeta_max: float) -> float:
    """Recentred window maximum:
    -2 log zeta_max + 2 log log(T/2pi) - (3/2) log log log(T/2pi).

    Needs the triple logarithm to exist (T above ~95); NaN below that.
    """
    llt = math.log(math.log(T / TWO_PI)) if T / TWO_PI > 1.0 else float("nan")
    if not llt > 0.0:
        return float("nan")
    return -2.0 * math.log(zeta_max) + 2.0 * math.log(math.log(T / TWO_PI)) - 1.5 * math.log(llt)


def zeta_partition(T: float, beta, points_per_unit: int | None = None):
    """log of the window partition sum
    (log(T/2pi)/2pi) int_T^{T+2pi} |zeta|^{2 beta} dt, by Riemann sum."""
    beta_arr = np.atleast_1d(np.asarray(beta, dtype=float))
    if np.any(beta_arr <= 0):
        raise DomainError("beta must be positive")
    if points_per_unit is None:
        points_per_unit = default_points_per_unit(T)
    ts = _window_grid(T, TWO_PI, points_per_unit)
    log_abs = np.log(np.maximum(np.abs(hardy_z_grid(ts)), 1e-300))
    dt = ts[1] - ts[0]
    expo = 2.0 * beta_arr[:, None] * log_abs[None, :]
    peak = expo.max(axis=1)
    out = (
        math.log(zero_density(T))
        + math.log(dt)
        + peak
        + np.log(np.sum(np.exp(expo - peak[:, None]), axis=1))
    )
    if np.ndim(beta) == 0:
        return float(out[0])
    return out


def log_moment_normalization(T: float, beta: float, prime_limit: int = 100000) -> float:
    """log of the leading-order moment normalization
    log(T/2pi) * a(beta) (G^2(1+beta)/G(1+2beta)) (log(T/2pi))^{beta^2}."""
    from .specfun import log_barnes_g

    x = math.log(T / TWO_PI)
    a = theory.arithmetic_factor(beta, prime_limit).value
    return (
        math.log(x)
        + math.log(a)
        + 2.0 * log_barnes_g(1.0 + beta).real
        - log_barnes_g(1.0 + 2.0 * beta).real
        + beta * beta * math.log(x)
    )


def d_statistic(T: float, beta: float, log_z: float, prime_limit: int = 100000) -> float:
    """Freezing statistic of one window partition sum.

    D = beta + 1/beta + [log Z - log normalization]/(beta log log(T/2pi));
    hovers near beta + 1/beta below the transition and near 2 above it.
    """
    if beta <= 0:
        raise DomainError("beta must be positive")
    x = math.log(T / TWO_PI)
    return beta + 1.0 / beta + (log_z - log_moment_normalization(T, beta, prime_limit)) / (
        beta * math.log(x)
    )


def zeta_high_measure(T: float, L: float, x: float, points_per_unit: int | None = None) -> float:
    """Fraction of the window where 2 log|zeta| >= 2x log((L/2pi) log(T/2pi))."""
    if not 0.0 < x < 1.0:
        raise DomainError("level parameter x must lie in (0, 1)")
    if points_per_unit is None:
        points_per_unit = default_points_per_unit(T)
    ts = _window_grid(T, L, points_per_unit)
    log_abs = np.log(np.maximum(np.abs(hardy_z_grid(ts)), 1e-300))
    n_arc = (L / TWO_PI) * math.log(T / TWO_PI)
    return float(np.mean(log_abs > x * math.log(n_arc)))


def count_zero_sign_changes(T: float, L: float, points_per_unit: int | None = None) -> int:
    """Number of sign changes of Z on [T, T+L] at the scan resolution."""
    if points_per_unit is None:
        points_per_unit = default_points_per_unit(T)
    z = hardy_z_grid(_window_grid(T, L, points_per_unit))
    return int(np.sum(np.signbit(z[1:]) != np.signbit(z[:-1])))


# ---------------------------------------------------------------------------
# Prime-sum correlation check
# ---------------------------------------------------------------------------

def diag_correlation(x: float, prime_limit: int) -> tuple[float, float]:
    """Two-point correlation of Re log zeta in the diagonal prime-sum form.

    Returns (truncated prime double sum, closed form (1/2) Re log zeta(1+ix)).
    The first sum over primes telescopes into the Euler product for
    zeta(1+ix); the n >= 2 part converges absolutely.  The first sum is
    only conditionally convergent: the truncation approximates the closed
    form once x log(prime_limit) is large, mirroring the validity window
    of the diagonal approximation itself.
    """
    if not 0.0 < x < 1.0:
        raise DomainError("separation x must lie in (0, 1)")
    if prime_limit < 1000:
        raise DomainError("prime cutoff must be at least 1e3")
    p = primes_up_to(prime_limit).primes.astype(float)
    log_p = np.log(p)
    # first sum: (1/2) sum_p sum_n cos(n x log p)/(n p^n), i.e. the real part
    # of the truncated Euler product for log zeta(1 + ix)
    s1 = -0.5 * float(np.sum(np.log1p(-(p ** -complex(1.0, x)))).real)
    # second sum: (1/2) sum_p sum_{n>=2} (1-n)/n^2 p^{-n} cos(n x log p),
    # absolutely convergent
    s2 = 0.0
    for n in range(2, 80):
        with np.errstate(under="ignore"):
            term = float(np.sum(p ** (-float(n)) * np.cos(n * x * log_p)))
        s2 += 0.5 * (1.0 - n) / n**2 * term
        if abs(term) < 1e-20:
            break
    truncated = s1 + s2
    closed = 0.5 * complex(np.log(euler_maclaurin_zeta(complex(1.0, x)))).real
    return truncated, closed
