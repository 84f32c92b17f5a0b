"""Periodic grids, DFT contract, Fourier multipliers and basic norms.

Everything lives on the torus R/2*pi*lambda*Z sampled at N equispaced
points.  Coefficients follow the Fourier-series convention

    u_hat(xi_k) = (1/N) sum_j u(x_j) exp(-i xi_k x_j),   xi_k = k/lambda,

so that a band-limited function satisfies u(x) = sum_k u_hat(xi_k) e^{i xi_k x}
and Plancherel reads  int |u|^2 dx = 2*pi*lambda * sum_k |u_hat(xi_k)|^2.

The Nyquist mode k = -N/2 has no conjugate partner and is zeroed on field
construction; the sign projections P_± exclude xi = 0 from both halves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Union

import numpy as np

HERMITIAN_TOL = 1e-12  # relative slack accepted before exact symmetrization

__all__ = [
    "SpatialGrid",
    "RealField",
    "ComplexField",
    "Field",
    "Multiplier",
    "make_grid",
    "hilbert",
    "project",
    "projection_symbol",
    "fractional",
    "free_propagate",
    "lebesgue_norm",
    "sobolev_norm",
    "derivative",
    "translate",
    "upsample",
    "field_from_fine_samples",
    "pointwise_product",
    "random_field",
]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class SpatialGrid:
    """Equispaced periodic lattice and its frequency dual.

    n points on the torus of circumference 2*pi*period_scale; frequencies
    are k/period_scale for k in {-n/2, ..., n/2 - 1}.
    """

    n: int
    period_scale: float

    def __post_init__(self):
        if not _is_power_of_two(self.n) or self.n < 8:
            raise ValueError(f"grid size must be a power of two >= 8, got {self.n}")
        if self.period_scale < 1:
            raise ValueError(
                f"period scale must be >= 1, got {self.period_scale}"
            )

    @property
    def length(self) -> float:
        return 2.0 * np.pi * self.period_scale

    @property
    def dx(self) -> float:
        return self.length / self.n

    @cached_property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * self.dx

    @cached_property
    def k(self) -> np.ndarray:
        """Integer mode numbers in FFT order: 0, 1, ..., n/2-1, -n/2, ..., -1."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n).astype(np.int64)

    @cached_property
    def xi(self) -> np.ndarray:
        """Frequencies k/lambda in FFT order."""
        return self.k / self.period_scale

    @cached_property
    def nyquist_index(self) -> int:
        return self.n // 2

    def max_frequency(self) -> float:
        """Largest |xi| on the lattice (the Nyquist line)."""
        return (self.n // 2) / self.period_scale

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SpatialGrid)
            and self.n == other.n
            and self.period_scale == other.period_scale
        )

    def __hash__(self):
        return hash((self.n, self.period_scale))


def make_grid(n: int, period_scale: float = 1.0) -> SpatialGrid:
    """Build the periodic grid; rejects non-power-of-two n and period_scale < 1."""
    return SpatialGrid(n, float(period_scale))


class _FieldBase:
    """One space slice with its spectral representation.

    Canonical storage is the coefficient array in FFT order; samples are the
    exact band-limited synthesis on the grid.
    """

    grid: SpatialGrid

    def __init__(self, grid: SpatialGrid, coefficients: np.ndarray):
        coefficients = np.asarray(coefficients, dtype=np.complex128).copy()
        if coefficients.shape != (grid.n,):
            raise ValueError("coefficient array does not match the grid")
        coefficients[grid.nyquist_index] = 0.0
        self.grid = grid
        self._coeff = coefficients

    @property
    def coefficients(self) -> np.ndarray:
        return self._coeff

    def copy_coefficients(self) -> np.ndarray:
        return self._coeff.copy()

    def _synthesize(self) -> np.ndarray:
        return np.fft.ifft(self._coeff) * self.grid.n

    def __add__(self, other):
        self._check_grid(other)
        return _wrap(self.grid, self._coeff + other._coeff)

    def __sub__(self, other):
        self._check_grid(other)
        return _wrap(self.grid, self._coeff - other._coeff)

    def __mul__(self, scalar):
        return _wrap(self.grid, self._coeff * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return _wrap(self.grid, -self._coeff)

    def _check_grid(self, other):
        if self.grid != other.grid:
            raise ValueError("fields live on different grids")

    @property
    def mean(self) -> complex:
        return complex(self._coeff[0])


class RealField(_FieldBase):
    """Real-valued field; coefficients are Hermitian-symmetric."""

    def __init__(self, grid: SpatialGrid, coefficients: np.ndarray):
        super().__init__(grid, coefficients)
        c = self._coeff
        mirror = np.conj(c[(-grid.k) % grid.n])
        scale = np.max(np.abs(c))
        if scale > 0 and np.max(np.abs(c - mirror)) > HERMITIAN_TOL * max(scale, 1.0):
            raise ValueError("coefficients are not Hermitian-symmetric")
        # symmetrize exactly so realness cannot drift
        self._coeff = 0.5 * (c + mirror)
        self._coeff[grid.nyquist_index] = 0.0

    @classmethod
    def from_samples(cls, grid: SpatialGrid, samples) -> "RealField":
        samples = np.asarray(samples, dtype=np.float64)
        if samples.shape != (grid.n,):
            raise ValueError("sample array does not match the grid")
        return cls(grid, np.fft.fft(samples) / grid.n)

    @property
    def samples(self) -> np.ndarray:
        return self._synthesize().real

    @property
    def imag_residue(self) -> float:
        return float(np.max(np.abs(self._synthesize().imag)))


class ComplexField(_FieldBase):
    """Complex-valued field; no symmetry constraint."""

    @classmethod
    def from_samples(cls, grid: SpatialGrid, samples) -> "ComplexField":
        samples = np.asarray(samples, dtype=np.complex128)
        if samples.shape != (grid.n,):
            raise ValueError("sample array does not match the grid")
        return cls(grid, np.fft.fft(samples) / grid.n)

    @property
    def samples(self) -> np.ndarray:
        return self._synthesize()


Field = Union[RealField, ComplexField]


def _is_hermitian(grid: SpatialGrid, coeff: np.ndarray) -> bool:
    mirror = np.conj(coeff[(-grid.k) % grid.n])
    scale = max(float(np.max(np.abs(coeff))), 1e-300)
    return float(np.max(np.abs(coeff - mirror))) <= HERMITIAN_TOL * max(scale, 1.0)


def _wrap(grid: SpatialGrid, coeff: np.ndarray) -> Field:
    """Wrap coefficients as RealField when Hermitian, else ComplexField."""
    if _is_hermitian(grid, coeff):
        return RealField(grid, coeff)
    return ComplexField(grid, coeff)


@dataclass(frozen=True)
class Multiplier:
    """Fourier multiplier: diagonal action coeff(xi) -> symbol(xi)*coeff(xi)."""

    name: str
    symbol: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    def values(self, grid: SpatialGrid) -> np.ndarray:
        return np.asarray(self.symbol(grid.xi), dtype=np.complex128)

    def apply(self, f: Field) -> Field:
        return _wrap(f.grid, f.coefficients * self.values(f.grid))

    def __call__(self, f: Field) -> Field:
        return self.apply(f)

    def compose(self, other: "Multiplier") -> "Multiplier":
        return Multiplier(
            name=f"{self.name}*{other.name}",
            symbol=lambda xi, a=self.symbol, b=other.symbol: np.asarray(a(xi))
            * np.asarray(b(xi)),
        )


HILBERT = Multiplier("hilbert", lambda xi: -1j * np.sign(xi))
DERIVATIVE = Multiplier("d/dx", lambda xi: 1j * xi)


def hilbert(f: Field) -> Field:
    """Hilbert transform, symbol -i*sgn(xi) with sgn(0) = 0."""
    return HILBERT.apply(f)


def derivative(f: Field, order: int = 1) -> Field:
    return _wrap(f.grid, f.coefficients * (1j * f.grid.xi) ** order)


def projection_symbol(which: str, xi: np.ndarray, shell: int | None = None) -> np.ndarray:
    """Mask values of the named projection at frequencies xi.

    plus/minus are the sharp sign projections (xi = 0 in neither half);
    hi/lo use the smooth cutoff eta; HI/LO are the sharp |xi| >= 8 split,
    which keeps the high-frequency reconstruction identity exact; dyadic
    is the shell bump phi_N.
    """
    from . import lp  # cyclic at import time otherwise

    xi = np.asarray(xi, dtype=np.float64)
    if which == "plus":
        return (xi > 0).astype(np.float64)
    if which == "minus":
        return (xi < 0).astype(np.float64)
    if which == "hi":
        return 1.0 - lp.eta(xi)
    if which == "lo":
        return lp.eta(xi)
    if which == "HI":
        return (np.abs(xi) >= 8.0).astype(np.float64)
    if which == "LO":
        return (np.abs(xi) < 8.0).astype(np.float64)
    if which == "plus_hi":
        return projection_symbol("plus", xi) * projection_symbol("hi", xi)
    if which == "plus_HI":
        return projection_symbol("plus", xi) * projection_symbol("HI", xi)
    if which == "minus_hi":
        return projection_symbol("minus", xi) * projection_symbol("hi", xi)
    if which == "dyadic":
        if shell is None or not _is_power_of_two(int(shell)):
            raise ValueError("dyadic projection needs a dyadic shell N >= 1")
        return lp.phi(xi / float(shell))
    raise ValueError(f"unknown projection {which!r}")


def project(f: Field, which: str, shell: int | None = None) -> Field:
    """Apply a named frequency projection (see projection_symbol)."""
    return _wrap(f.grid, f.coefficients * projection_symbol(which, f.grid.xi, shell))


def fractional(f: Field, kind: str, s: float) -> Field:
    """Riesz |xi|^s or Bessel (1+xi^2)^{s/2} potential of order -s."""
    xi = f.grid.xi
    if kind == "riesz":
        if s < 0:
            if abs(f.coefficients[0]) > 1e-13 * max(np.max(np.abs(f.coefficients)), 1.0):
                raise ValueError("riesz potential with s < 0 needs a mean-zero field")
            mag = np.abs(xi)
            vals = np.zeros_like(mag)
            nz = mag > 0
            vals[nz] = mag[nz] ** s
        else:
            vals = np.abs(xi) ** s
        return _wrap(f.grid, f.coefficients * vals)
    if kind == "bessel":
        return _wrap(f.grid, f.coefficients * (1.0 + xi**2) ** (s / 2.0))
    raise ValueError(f"unknown potential kind {kind!r}")


def free_propagate(f: Field, t: float) -> Field:
    """Free dispersive group: coefficient at xi multiplied by exp(-i t |xi| xi)."""
    xi = f.grid.xi
    return _wrap(f.grid, f.coefficients * np.exp(-1j * t * np.abs(xi) * xi))


def translate(f: Field, shift: float) -> Field:
    """f(. - shift), computed spectrally (exact for band-limited fields)."""
    return _wrap(f.grid, f.coefficients * np.exp(-1j * f.grid.xi * shift))


def lebesgue_norm(f: Field, p) -> float:
    """Riemann-sum L^p norm on the sample grid; p in {1, 2, 4, inf}."""
    a = np.abs(f.samples)
    if p == np.inf or p == "inf":
        return float(np.max(a))
    if p not in (1, 2, 4):
        raise ValueError("supported exponents: 1, 2, 4, inf")
    return float((np.sum(a**p) * f.grid.dx) ** (1.0 / p))


def sobolev_norm(f: Field, s: float) -> float:
    """H^s norm (2*pi*lambda * sum (1+xi^2)^s |u_hat|^2)^{1/2}."""
    w = (1.0 + f.grid.xi**2) ** s
    return float(np.sqrt(f.grid.length * np.sum(w * np.abs(f.coefficients) ** 2)))


# ---------------------------------------------------------------------------
# Oversampled products.  exp(i F) and friends are not band-limited; products
# involving them are evaluated on a refined lattice and truncated afterwards.
# ---------------------------------------------------------------------------


def upsample(f: Field, factor: int) -> np.ndarray:
    """Samples of f on the factor-times-refined lattice (exact synthesis)."""
    n, nf = f.grid.n, f.grid.n * factor
    fine = np.zeros(nf, dtype=np.complex128)
    half = n // 2
    fine[:half] = f.coefficients[:half]
    fine[nf - half :] = f.coefficients[n - half :]
    out = np.fft.ifft(fine) * nf
    if isinstance(f, RealField):
        return out.real
    return out


def fine_frequencies(grid: SpatialGrid, factor: int) -> np.ndarray:
    nf = grid.n * factor
    return np.fft.fftfreq(nf, d=1.0 / nf) / grid.period_scale


def field_from_fine_samples(grid: SpatialGrid, fine: np.ndarray, factor: int) -> Field:
    """Truncate fine-lattice samples back to the coarse band."""
    nf = grid.n * factor
    fine = np.asarray(fine, dtype=np.complex128)
    if fine.shape != (nf,):
        raise ValueError("fine sample array does not match grid*factor")
    chat = np.fft.fft(fine) / nf
    coeff = np.zeros(grid.n, dtype=np.complex128)
    half = grid.n // 2
    coeff[:half] = chat[:half]
    coeff[grid.n - half :] = chat[nf - half :]
    return _wrap(grid, coeff)


def pointwise_product(f: Field, g: Field, oversample: int = 4) -> Field:
    """Product f*g on an oversampled lattice, truncated to the common grid."""
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    ff = upsample(f, oversample)
    gg = upsample(g, oversample)
    return field_from_fine_samples(f.grid, np.asarray(ff) * np.asarray(gg), oversample)


def random_field(
    grid: SpatialGrid,
    rng: np.random.Generator,
    decay: float = 1.0,
    amplitude: float = 1.0,
    max_mode: int | None = None,
    mean_zero: bool = True,
) -> RealField:
    """Random real field with coefficients ~ CN(0,1) * (1+|xi|)^{-decay}."""
    n = grid.n
    coeff = np.zeros(n, dtype=np.complex128)
    kmax = n // 2 - 1 if max_mode is None else min(max_mode, n // 2 - 1)
    z = rng.standard_normal(kmax) + 1j * rng.standard_normal(kmax)
    ks = np.arange(1, kmax + 1)
    shaped = z * (1.0 + ks / grid.period_scale) ** (-decay)
    coeff[1 : kmax + 1] = shaped
    coeff[-kmax:] = np.conj(shaped[::-1])
    if not mean_zero:
        coeff[0] = rng.standard_normal()
    f = RealField(grid, coeff)
    peak = float(np.max(np.abs(f.samples)))
    if peak > 0:
        f = f * (amplitude / peak)
    return f  # type: ignore[return-value]
