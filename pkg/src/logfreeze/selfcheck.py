"""Fast invariant suite: structural identities that must always hold.

Each check runs in well under a second; the whole suite stays below a
minute.  Checks call through the public module surface so a corrupted
implementation is caught and named.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun, theory, zeta


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check(name, passed, detail) -> CheckResult:
    return CheckResult(name, bool(passed), detail)


def _gamma_recurrence() -> CheckResult:
    rng = np.random.default_rng(42)
    z = rng.uniform(0.2, 12.0, 200) + 1j * rng.uniform(-10.0, 10.0, 200)
    res = np.exp(specfun.log_gamma(z + 1.0) - specfun.log_gamma(z)) / z - 1.0
    worst = float(np.max(np.abs(res)))
    return _check("gamma-recurrence", worst < 1e-11, f"worst deviation {worst:.2e}")


def _gamma_duplication() -> CheckResult:
    rng = np.random.default_rng(7)
    z = rng.uniform(0.3, 10.0, 200)
    lhs = specfun.log_gamma(z) + specfun.log_gamma(z + 0.5)
    rhs = (1.0 - 2.0 * z) * math.log(2.0) + 0.5 * math.log(math.pi) + specfun.log_gamma(2.0 * z)
    worst = float(np.max(np.abs(np.exp(lhs - rhs) - 1.0)))
    return _check("gamma-duplication", worst < 1e-11, f"worst deviation {worst:.2e}")


def _barnes_recurrence() -> CheckResult:
    rng = np.random.default_rng(3)
    z = rng.uniform(0.3, 15.0, 100) + 1j * rng.uniform(-8.0, 8.0, 100)
    res = np.exp(specfun.log_barnes_g(z + 1.0) - specfun.log_barnes_g(z) - specfun.log_gamma(z))
    worst = float(np.max(np.abs(res - 1.0)))
    return _check("barnes-g-recurrence", worst < 1e-10, f"worst deviation {worst:.2e}")


def _double_gamma_identities() -> CheckResult:
    worst = 0.0
    for x in (0.3, 0.7, 1.5):
        z = np.array([0.8, 1.3, 2.4])
        sym = np.max(np.abs(specfun.log_double_gamma(z, x) - specfun.log_double_gamma(z, 1.0 / x)))
        lhs = specfun.log_double_gamma(z + x, x)
        rhs = (
            (0.5 - x * z) * math.log(x)
            + 0.5 * (x - 1.0) * specfun.LOG_2PI
            + specfun.log_gamma(x * z)
            + specfun.log_double_gamma(z, x)
        )
        shift = np.max(np.abs(lhs - rhs))
        worst = max(worst, float(sym), float(shift))
    return _check("double-gamma-identities", worst < 1e-10, f"worst deviation {worst:.2e}")


def _bessel_reference() -> CheckResult:
    dev = max(
        abs(specfun.bessel_k(0, 1.0) - 0.42102443824070834),
        abs(specfun.bessel_k(1, 1.0) - 0.6019072301972346),
    )
    small = abs(2e-4 * specfun.bessel_k(1, 2e-4) - 1.0)
    ok = dev < 1e-13 and small < 1e-6
    return _check("bessel-k-reference", ok, f"ref dev {dev:.2e}, small-arg dev {small:.2e}")


def _laplace_functional() -> CheckResult:
    w = 2.0 * math.exp(0.35)
    ref = w * specfun.bessel_k(1, w)
    dev = abs(theory.g_beta(0.7, 1.0) - ref)
    dual = abs(theory.g_beta(-1.3, 0.6) - theory.g_beta(-1.3, 1.0 / 0.6))
    ok = dev < 1e-11 and dual < 1e-9
    return _check("laplace-functional", ok, f"bessel dev {dev:.2e}, duality dev {dual:.2e}")


def _max_density_normalization() -> CheckResult:
    xs = np.linspace(-45.0, 15.0, 20001)
    mass = float(np.trapezoid(theory.pdf_max_full_circle(xs), xs))
    return _check("max-density-normalization", abs(mass - 1.0) < 1e-6, f"mass {mass:.9f}")


def _euler_product() -> CheckResult:
    p = specfun.primes_up_to(10**6).primes.astype(float)
    prod = float(-np.sum(np.log1p(-p**-2.0)))
    dev = abs(math.exp(prod) - math.pi**2 / 6.0)
    return _check("euler-product-at-2", dev < 2e-6, f"deviation {dev:.2e}")


def _prime_count() -> CheckResult:
    count = len(specfun.primes_up_to(10**4))
    return _check("prime-count-1e4", count == 1229, f"pi(1e4) = {count}")


def _first_zeta_zero() -> CheckResult:
    lo, hi = 14.0, 14.25
    flo = zeta.zeta_half_line(lo).z_value
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        fm = zeta.zeta_half_line(mid).z_value
        if (flo < 0) == (fm < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    dev = abs(0.5 * (lo + hi) - 14.134725141734693)
    return _check("first-zeta-zero", dev < 1e-6, f"bracketed to {dev:.2e}")


def _freezing_kink() -> CheckResult:
    left = theory.freezing_curve(1.0 - 1e-9)
    right = theory.freezing_curve(1.0 + 1e-9)
    ok = abs(left - 2.0) < 1e-8 and right == 2.0
    return _check("freezing-curve-kink", ok, f"left {left!r}, right {right!r}")


_CHECKS = (
    _gamma_recurrence,
    _gamma_duplication,
    _barnes_recurrence,
    _double_gamma_identities,
    _bessel_reference,
    _laplace_functional,
    _max_density_normalization,
    _euler_product,
    _prime_count,
    _first_zeta_zero,
    _freezing_kink,
)


def run_all() -> list[CheckResult]:
    return [fn() for fn in _CHECKS]
