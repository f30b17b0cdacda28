"""Periodic spectral core: grid, transforms, multipliers, Lebesgue norms.

The computational domain is the torus [-12*pi*M, 12*pi*M)^d sampled at N
points per axis, so the frequency lattice is {k / (12 M) : k integer}.
With that choice every carrier frequency of the form (17/12) * 2**n * M
sits exactly on a lattice point, which is what the packet construction
in :mod:`hks.construction` relies on.

Transform convention: the forward transform carries the e^{-i x.xi} sign
and is mean-preserving, i.e. the coefficient at frequency zero equals the
arithmetic mean of the field.  The inverse is a plain coefficient sum,
f(x) = sum_xi F(xi) e^{i x.xi}.  A continuum pair (with inverse carrying
(2*pi)^{-d}) maps onto this normalization by F_disc(xi) ~ fhat(xi) / |box|;
we never compare absolute continuum constants, only lattice quantities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Grid",
    "Field",
    "SpectralField",
    "MultiplierSymbol",
    "make_grid",
    "transform",
    "inverse_transform",
    "apply_multiplier",
    "lp_norm",
    "helmholtz_inverse",
    "one_minus_laplacian",
    "derivative",
    "laplacian",
    "identity_symbol",
    "dealias_cutoff_index",
    "dealias_field",
    "dealiased_product",
    "band_limited_noise",
]

_MAX_SAMPLES_LOG2 = 31  # reject grids with more than 2**31 samples


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-12*pi*M, 12*pi*M)^d.

    Parameters
    ----------
    d : int
        Space dimension, 1 to 3.
    M : int
        Box scale; the half-length is 12*pi*M and the frequency lattice
        step is 1/(12*M).
    N : int
        Points per axis; a power of two, at least 16.
    """

    d: int
    M: int
    N: int
    # derived, filled in __post_init__
    length: float = field(init=False, repr=False)
    spacing: float = field(init=False, repr=False)
    nyquist: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.d not in (1, 2, 3):
            raise ValueError(f"d must be 1, 2 or 3, got {self.d}")
        if self.M < 1 or int(self.M) != self.M:
            raise ValueError(f"M must be a positive integer, got {self.M}")
        n = self.N
        if n < 16 or (n & (n - 1)) != 0:
            raise ValueError(f"N must be a power of two >= 16, got {n}")
        if self.d * math.log2(n) > _MAX_SAMPLES_LOG2:
            raise ValueError(f"grid too large: N**d exceeds 2**{_MAX_SAMPLES_LOG2}")
        object.__setattr__(self, "length", 24.0 * math.pi * self.M)
        object.__setattr__(self, "spacing", 24.0 * math.pi * self.M / n)
        object.__setattr__(self, "nyquist", n / (24.0 * self.M))
        object.__setattr__(self, "_cache", {})

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    @property
    def freq_step(self) -> float:
        return 1.0 / (12.0 * self.M)

    def axis_coordinates(self) -> np.ndarray:
        """Physical coordinates along one axis, x_i = -12*pi*M + i*spacing."""
        return -12.0 * math.pi * self.M + self.spacing * np.arange(self.N)

    def axis_wavenumbers(self) -> np.ndarray:
        """Signed integer lattice indices along one axis, fft order."""
        key = "k_axis"
        if key not in self._cache:
            self._cache[key] = np.fft.fftfreq(self.N, d=1.0 / self.N)
        return self._cache[key]

    def frequency_axes(self) -> tuple[np.ndarray, ...]:
        """Per-axis frequency arrays xi_a = k_a/(12 M), broadcast-ready."""
        key = "xi_axes"
        if key not in self._cache:
            k = self.axis_wavenumbers() * self.freq_step
            axes = []
            for a in range(self.d):
                shp = [1] * self.d
                shp[a] = self.N
                axes.append(k.reshape(shp))
            self._cache[key] = tuple(axes)
        return self._cache[key]

    def frequency_norm2(self) -> np.ndarray:
        """|xi|^2 on the full lattice."""
        key = "xi_norm2"
        if key not in self._cache:
            axes = self.frequency_axes()
            out = np.zeros(self.shape)
            for ax in axes:
                out = out + ax**2
            self._cache[key] = out
        return self._cache[key]

    def phase(self) -> np.ndarray:
        """(-1)**(k_1+...+k_d): relates numpy's origin-at-index-0 DFT to
        the transform anchored at x = -12*pi*M."""
        key = "phase"
        if key not in self._cache:
            k = self.axis_wavenumbers().astype(np.int64)
            p1 = 1.0 - 2.0 * (np.abs(k) % 2)
            out = np.ones(self.shape)
            for a in range(self.d):
                shp = [1] * self.d
                shp[a] = self.N
                out = out * p1.reshape(shp)
            self._cache[key] = out
        return self._cache[key]

    def origin_index(self) -> tuple[int, ...]:
        """Grid index of the physical point x = 0."""
        return (self.N // 2,) * self.d


def make_grid(d: int, M: int, N: int) -> Grid:
    return Grid(d=d, M=M, N=N)


@dataclass
class Field:
    """Real scalar field sampled on a :class:`Grid`."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        self.values = v

    def __add__(self, other: "Field") -> "Field":
        _check_same_grid(self.grid, other.grid)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        _check_same_grid(self.grid, other.grid)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, c: float) -> "Field":
        return Field(self.grid, self.values * float(c))

    __rmul__ = __mul__

    def pointwise(self, other: "Field") -> "Field":
        """Plain grid-pointwise product (no dealiasing)."""
        _check_same_grid(self.grid, other.grid)
        return Field(self.grid, self.values * other.values)


@dataclass
class SpectralField:
    """Fourier coefficients of a field, fft-ordered on the frequency lattice."""

    grid: Grid
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.coefficients, dtype=np.complex128)
        if c.shape != self.grid.shape:
            raise ValueError(f"coefficients shape {c.shape} != grid shape {self.grid.shape}")
        self.coefficients = c


def _check_same_grid(a: Grid, b: Grid) -> None:
    if a is not b and (a.d, a.M, a.N) != (b.d, b.M, b.N):
        raise ValueError("fields live on different grids")


def transform(f: Field) -> SpectralField:
    """Forward transform, F(xi_k) = N^{-d} sum_x f(x) e^{-i x.xi_k}.

    The coefficient at frequency zero equals mean(f).
    """
    g = f.grid
    coeff = np.fft.fftn(f.values) * (g.phase() / g.N**g.d)
    return SpectralField(g, coeff)


def inverse_transform(F: SpectralField) -> Field:
    """Inverse transform, f(x) = sum_k F(xi_k) e^{i x.xi_k}.

    The imaginary residue is discarded; for coefficient sets with Hermitian
    symmetry (every transform of a real field) it is at roundoff level.
    """
    g = F.grid
    vals = np.fft.ifftn(F.coefficients * g.phase()) * g.N**g.d
    return Field(g, np.ascontiguousarray(vals.real))


@dataclass(frozen=True)
class MultiplierSymbol:
    """Fourier multiplier xi -> sigma(xi).

    ``fn`` receives the tuple of broadcast-ready per-axis frequency arrays
    and must return the symbol evaluated on the lattice.  ``order`` is the
    growth order m in the S^m class (bookkeeping only).
    """

    name: str
    order: float
    fn: Callable[[tuple[np.ndarray, ...]], np.ndarray]

    def evaluate(self, grid: Grid) -> np.ndarray:
        out = np.asarray(self.fn(grid.frequency_axes()))
        out = np.broadcast_to(out, grid.shape)
        if not np.all(np.isfinite(out)):
            raise ValueError(f"symbol {self.name!r} is not finite on the lattice")
        return out

    def __mul__(self, other: "MultiplierSymbol") -> "MultiplierSymbol":
        f1, f2 = self.fn, other.fn
        return MultiplierSymbol(
            name=f"{self.name}*{other.name}",
            order=self.order + other.order,
            fn=lambda axes: np.asarray(f1(axes)) * np.asarray(f2(axes)),
        )


def identity_symbol() -> MultiplierSymbol:
    return MultiplierSymbol("one", 0.0, lambda axes: np.array(1.0))


def helmholtz_inverse() -> MultiplierSymbol:
    """Symbol of (1 - Laplacian)^{-1}, i.e. 1/(1+|xi|^2)."""

    def fn(axes: tuple[np.ndarray, ...]) -> np.ndarray:
        s = np.zeros(np.broadcast_shapes(*(a.shape for a in axes)))
        for a in axes:
            s = s + a**2
        return 1.0 / (1.0 + s)

    return MultiplierSymbol("helmholtz_inverse", -2.0, fn)


def one_minus_laplacian() -> MultiplierSymbol:
    """Symbol of (1 - Laplacian), i.e. 1 + |xi|^2."""

    def fn(axes: tuple[np.ndarray, ...]) -> np.ndarray:
        s = np.zeros(np.broadcast_shapes(*(a.shape for a in axes)))
        for a in axes:
            s = s + a**2
        return 1.0 + s

    return MultiplierSymbol("one_minus_laplacian", 2.0, fn)


def derivative(axis: int) -> MultiplierSymbol:
    """Symbol of the partial derivative along ``axis`` (0-based), i*xi_a."""

    def fn(axes: tuple[np.ndarray, ...]) -> np.ndarray:
        if axis >= len(axes):
            raise ValueError(f"axis {axis} out of range for d={len(axes)}")
        return 1j * axes[axis]

    return MultiplierSymbol(f"d/dx{axis + 1}", 1.0, fn)


def laplacian() -> MultiplierSymbol:
    def fn(axes: tuple[np.ndarray, ...]) -> np.ndarray:
        s = np.zeros(np.broadcast_shapes(*(a.shape for a in axes)))
        for a in axes:
            s = s + a**2
        return -s

    return MultiplierSymbol("laplacian", 2.0, fn)


def apply_multiplier(symbol: MultiplierSymbol, F: SpectralField) -> SpectralField:
    """Coefficientwise product with the symbol evaluated on the lattice.

    Composition is exact: applying sigma1 then sigma2 equals applying the
    pointwise product symbol sigma1*sigma2.
    """
    return SpectralField(F.grid, F.coefficients * symbol.evaluate(F.grid))


def lp_norm(f: Field, p: float) -> float:
    """Discrete L^p norm with rectangle-rule quadrature weight spacing**d.

    p may be any real >= 1 or math.inf.
    """
    if p == math.inf:
        return float(np.max(np.abs(f.values)))
    if p < 1:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    w = f.grid.spacing ** f.grid.d
    return float((np.sum(np.abs(f.values) ** p) * w) ** (1.0 / p))


# ---------------------------------------------------------------------------
# dealiasing helpers (shared by the solver and the commutator)

def dealias_cutoff_index(grid: Grid, fraction: float = 2.0 / 3.0) -> int:
    """Largest retained |k| per axis under the given dealias fraction."""
    return int(math.floor(fraction * (grid.N // 2)))

def _dealias_keep(grid: Grid, fraction: float) -> np.ndarray:
    key = ("dealias", fraction)
    if key not in grid._cache:
        kc = dealias_cutoff_index(grid, fraction)
        k = np.abs(grid.axis_wavenumbers())
        keep1 = (k <= kc).astype(np.float64)
        out = np.ones(grid.shape)
        for a in range(grid.d):
            shp = [1] * grid.d
            shp[a] = grid.N
            out = out * keep1.reshape(shp)
        grid._cache[key] = out
    return grid._cache[key]


def dealias_field(f: Field, fraction: float = 2.0 / 3.0) -> Field:
    """Zero all modes with any axis index above the dealias cutoff."""
    g = f.grid
    vals = np.fft.ifftn(np.fft.fftn(f.values) * _dealias_keep(g, fraction)).real
    return Field(g, vals)


def dealiased_product(a: Field, b: Field, fraction: float = 2.0 / 3.0) -> Field:
    """Product computed by the truncate-multiply-truncate rule.

    Both factors are band-limited to the cutoff, multiplied pointwise, and
    the result is truncated again, so quadratic interactions of retained
    modes never alias back into the retained band.
    """
    _check_same_grid(a.grid, b.grid)
    g = a.grid
    keep = _dealias_keep(g, fraction)
    av = np.fft.ifftn(np.fft.fftn(a.values) * keep).real
    bv = np.fft.ifftn(np.fft.fftn(b.values) * keep).real
    pv = np.fft.ifftn(np.fft.fftn(av * bv) * keep).real
    return Field(g, pv)


def band_limited_noise(grid: Grid, kmax: int, seed: int, kmin: int = 0) -> Field:
    """Real random field with spectrum confined to kmin <= max_a|k_a| <= kmax.

    Deterministic for fixed (grid, kmax, kmin, seed); used by the lemma
    checks and the property tests.
    """
    if kmax >= grid.N // 2:
        raise ValueError("kmax must stay below the Nyquist index")
    rng = np.random.default_rng(seed)
    coeff = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    k = np.abs(grid.axis_wavenumbers())
    kinf = np.zeros(grid.shape)
    for a in range(grid.d):
        shp = [1] * grid.d
        shp[a] = grid.N
        kinf = np.maximum(kinf, k.reshape(shp))
    coeff *= (kinf <= kmax) & (kinf >= kmin)
    vals = np.fft.ifftn(coeff).real
    vals /= max(np.max(np.abs(vals)), 1e-300)
    return Field(grid, vals)
