"""Random samplers for the three regularizations of the log-correlated field.

* unitary-ensemble eigenphases and the log-modulus of the characteristic
  polynomial on an angular grid,
* the circular lattice Gaussian with covariance -2 log|2 sin(pi (k-m)/M)|
  and variance 2 log M + W,
* the truncated random Fourier series with 1/n power per harmonic,

plus partition sums, extreme values and sojourn measures of sampled grids.

All randomness flows through counter-based Philox streams keyed by
(master seed, stream index), so any draw is reproducible in isolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import DomainError

TWO_PI = 2.0 * math.pi

# grid floor: |p| is clamped at 1e-300 so V never exceeds ~1400
_LOG_ABS_FLOOR = -690.0

_CUE_N_MAX = 4096
_REM_M_MAX = 4096


@dataclass(frozen=True)
class Seed:
    """Counter-based RNG key: (master, stream) pins down every draw."""

    master: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.master % 2**64, self.stream % 2**64], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def with_stream(self, stream: int) -> "Seed":
        return Seed(self.master, stream)


@dataclass(frozen=True)
class PhaseVector:
    """Eigenphases of one unitary matrix, in [0, 2 pi)."""

    n: int
    phases: np.ndarray

    def __post_init__(self):
        if len(self.phases) != self.n:
            raise ValueError("phase count differs from matrix dimension")


@dataclass(frozen=True)
class FieldGrid:
    """Sampled values of the energy V on a uniform angular grid.

    theta_j = offset + j * arc_length / n_grid.
    """

    arc_length: float
    n_grid: int
    offset: float
    values: np.ndarray

    @property
    def thetas(self) -> np.ndarray:
        return self.offset + np.arange(self.n_grid) * (self.arc_length / self.n_grid)

    @property
    def step(self) -> float:
        return self.arc_length / self.n_grid


@dataclass(frozen=True)
class RemSample:
    """One draw of the circular lattice Gaussian."""

    m: int
    w: float
    values: np.ndarray


def _haar_phases(n: int, rng: np.random.Generator) -> np.ndarray:
    """Eigenphases of a Haar unitary via QR of a complex Ginibre matrix.

    The QR factor alone is not Haar distributed; multiplying by the phases
    of the diagonal of R makes the factorization unique and restores
    invariance.
    """
    for attempt in range(2):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        try:
            q, r = np.linalg.qr(a)
            d = np.diagonal(r)
            q = q * (d / np.abs(d))
            eig = np.linalg.eigvals(q)
        except np.linalg.LinAlgError:
            continue
        return np.sort(np.mod(np.angle(eig), TWO_PI))
    raise ArithmeticError("eigendecomposition failed twice on fresh draws")


def sample_cue_phases(n: int, seed: Seed) -> PhaseVector:
    """Eigenphases of one Haar-distributed n x n unitary matrix."""
    if not 2 <= n <= _CUE_N_MAX:
        raise DomainError(f"matrix dimension must lie in [2, {_CUE_N_MAX}]")
    return PhaseVector(n, _haar_phases(n, seed.generator()))


def log_charpoly_grid(
    phases: PhaseVector,
    arc_length: float = TWO_PI,
    n_grid: int | None = None,
    offset: float | None = None,
) -> FieldGrid:
    """V(theta) = -2 sum_n log(2 |sin((theta - phi_n)/2)|) on a uniform grid.

    The grid oversamples the eigenvalue spacing (default 16 points per
    spacing, at least 4 required) and is offset by half a step by default
    so nodes never land exactly on an eigenphase.  Nodes closer than
    ~1e-300 in |p| are clamped rather than raised: the singularities are
    integrable and never carry the maximum.
    """
    n = phases.n
    if n_grid is None:
        n_grid = 16 * n
    if n_grid < 4 * n:
        raise DomainError("grid must oversample: n_grid >= 4 N")
    if offset is None:
        offset = 0.5 * arc_length / n_grid
    thetas = offset + np.arange(n_grid) * (arc_length / n_grid)
    log_abs = _log_abs_charpoly(thetas, phases.phases)
    return FieldGrid(arc_length, n_grid, offset, -2.0 * log_abs)


def _log_abs_charpoly(thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """log |p(theta)| accumulated in grid chunks to bound memory."""
    out = np.empty(len(thetas))
    chunk = max(1, 2**22 // max(len(phis), 1))
    for start in range(0, len(thetas), chunk):
        block = thetas[start : start + chunk, None] - phis[None, :]
        s = np.abs(2.0 * np.sin(0.5 * block))
        np.maximum(s, 1e-300, out=s)
        out[start : start + chunk] = np.sum(np.log(s), axis=1)
    return np.maximum(out, _LOG_ABS_FLOOR)


def rem_covariance(m: int, w: float) -> np.ndarray:
    """Covariance of the circular lattice model:
    off-diagonal -2 log|2 sin(pi (k-j)/m)|, diagonal 2 log m + w."""
    k = np.arange(m)
    diff = np.abs(k[:, None] - k[None, :])
    with np.errstate(divide="ignore"):
        cov = -2.0 * np.log(2.0 * np.abs(np.sin(math.pi * diff / m)))
    np.fill_diagonal(cov, 2.0 * math.log(m) + w)
    return cov


class CircularRemSampler:
    """Caches the Cholesky factor of the lattice covariance for reuse."""

    def __init__(self, m: int, w: float = 1e-6):
        if not 2 <= m <= _REM_M_MAX:
            raise DomainError(f"lattice size must lie in [2, {_REM_M_MAX}]")
        if w <= 0:
            # the uniform mode carries variance exactly W (the off-diagonal
            # rows sum to -2 log m), so W = 0 is singular
            raise DomainError(
                "covariance not positive definite: the uniform mode has "
                "variance W, so any W > 0 is admissible but W = 0 is not"
            )
        self.m = m
        self.w = w
        cov = rem_covariance(m, w)
        try:
            self._chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            eigmin = float(np.linalg.eigvalsh(cov).min())
            raise DomainError(
                "covariance not positive definite; "
                f"smallest admissible W is about {w - eigmin:.3g}"
            ) from None

    def draw(self, rng: np.random.Generator, count: int = 1) -> np.ndarray:
        """count x m matrix of correlated Gaussians."""
        z = rng.standard_normal((self.m, count))
        return (self._chol @ z).T


def sample_circular_rem(m: int, w: float, seed: Seed) -> RemSample:
    """One mean-zero Gaussian vector with the exact lattice covariance."""
    sampler = CircularRemSampler(m, w)
    return RemSample(m, w, sampler.draw(seed.generator())[0])


def _fourier_values(k_max: int, n_grid: int, rng: np.random.Generator) -> np.ndarray:
    v = (rng.standard_normal(k_max) + 1j * rng.standard_normal(k_max)) / math.sqrt(2.0)
    spectrum = np.zeros(n_grid // 2 + 1, dtype=complex)
    spectrum[1 : k_max + 1] = v / np.sqrt(np.arange(1, k_max + 1))
    return np.fft.irfft(spectrum, n=n_grid) * n_grid


def sample_fourier_field(k_max: int, n_grid: int, seed: Seed) -> FieldGrid:
    """Truncated random Fourier series with harmonic weights 1/sqrt(n).

    V(t) = sum_{n<=K} (1/sqrt(n)) [v_n e^{int} + conj], complex Gaussian
    v_n with E|v_n|^2 = 1.  There is no constant mode, so the grid mean
    vanishes identically; the pointwise variance is 2 sum_{n<=K} 1/n.
    """
    if k_max < 1:
        raise DomainError("need at least one harmonic")
    if n_grid < 2 * k_max:
        raise DomainError("grid must resolve the highest harmonic: n_grid >= 2K")
    return FieldGrid(TWO_PI, n_grid, 0.0, _fourier_values(k_max, n_grid, seed.generator()))


def partition_function(field: FieldGrid, beta, n_scale: int):
    """log of the Riemann-sum partition function
    (N/2 pi) (L/n_grid) sum_j e^{-beta V_j}, computed with a max shift."""
    beta_arr = np.atleast_1d(np.asarray(beta, dtype=float))
    if np.any(beta_arr <= 0):
        raise DomainError("beta must be positive")
    v = field.values
    prefactor = math.log(n_scale * field.arc_length / (TWO_PI * field.n_grid))
    shift = -beta_arr[:, None] * v[None, :]
    peak = shift.max(axis=1)
    out = prefactor + peak + np.log(np.sum(np.exp(shift - peak[:, None]), axis=1))
    if np.ndim(beta) == 0:
        return float(out[0])
    return out


@dataclass(frozen=True)
class FieldExtremes:
    min_value: float
    argmin: float
    max_value: float


def field_extremes(field: FieldGrid) -> FieldExtremes:
    """Grid extremes of V with parabolic refinement of the minimum.

    V is smooth between eigenphases, so a three-point parabola through the
    minimal node sharpens both the location and the value; the refined
    value never exceeds the grid value.  On a full circle neighbors wrap.
    """
    v = field.values
    if len(v) == 0:
        raise DomainError("empty grid")
    j = int(np.argmin(v))
    full = abs(field.arc_length - TWO_PI) < 1e-12
    n = field.n_grid
    if full:
        vm, v0, vp = v[(j - 1) % n], v[j], v[(j + 1) % n]
    elif 0 < j < n - 1:
        vm, v0, vp = v[j - 1], v[j], v[j + 1]
    else:
        theta = field.offset + j * field.step
        return FieldExtremes(float(v[j]), float(theta), float(v.max()))
    denom = vm - 2.0 * v0 + vp
    if denom > 0:
        delta = 0.5 * (vm - vp) / denom
        refined = v0 - 0.25 * (vm - vp) * delta
    else:
        delta, refined = 0.0, v0
    theta = field.offset + (j + delta) * field.step
    return FieldExtremes(float(refined), float(theta % TWO_PI if full else theta), float(v.max()))


def sojourn_measure(field: FieldGrid, x, n_scale: int):
    """Fraction of the grid where -V/2 exceeds x log N_L (the high set)."""
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x_arr <= 0):
        raise DomainError("level parameter x must be positive")
    n_arc = n_scale * field.arc_length / TWO_PI
    half = -0.5 * field.values
    out = np.mean(half[None, :] > x_arr[:, None] * math.log(n_arc), axis=1)
    if np.ndim(x) == 0:
        return float(out[0])
    return out


def box_coarsen(abs_field: FieldGrid, n_boxes: int, q):
    """Coarse-grained moment zeta_q: box averages of |p| raised to q.

    The grid carries |p| values here (not V); n_boxes must divide the grid.
    """
    if abs_field.n_grid % n_boxes != 0:
        raise DomainError("number of boxes must divide the grid size")
    h = abs_field.values.reshape(n_boxes, -1).mean(axis=1)
    q_arr = np.atleast_1d(np.asarray(q, dtype=float))
    out = np.mean(h[None, :] ** q_arr[:, None], axis=1)
    if np.ndim(q) == 0:
        return float(out[0])
    return out
