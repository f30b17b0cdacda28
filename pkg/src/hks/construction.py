"""Packet-based initial data for the short-time instability experiments.

The envelope is band-limited by construction: its 1-D Fourier profile
equals 1 on |xi| <= 4^{-d}, vanishes for |xi| >= 2^{-d}, and interpolates
in between with the same smooth step the dyadic partition uses.  A packet
rides the carrier sin(c_n x_1) with c_n = (17/12) 2^n.  Because c_n is an
exact lattice frequency (the box length is a multiple of 24 pi), the
sampled packet's discrete spectrum is the envelope profile translated to
+-c_n with no leakage whatsoever, so for n >= 3 each packet lies in
exactly one dyadic block.

Initial data:

    S0 = sum_{n=3}^{n_max} 2^{-n(s+2)} f_n,     u0 = (1 - Laplacian) S0,

and the first-order drift v0 = div(u0 (1-u0) grad S0), evaluated with the
same dealiased flux routine the time stepper uses, so the solver's
right-hand side at u0 is exactly -v0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .littlewood_paley import make_partition, smooth_step
from .solver import transport_divergence
from .spectral import (
    Field,
    Grid,
    SpectralField,
    apply_multiplier,
    dealiased_product,
    derivative,
    inverse_transform,
    laplacian,
    make_grid,
    one_minus_laplacian,
    transform,
)

__all__ = [
    "Bump",
    "make_bump",
    "carrier_frequency",
    "make_fn",
    "InitialData",
    "make_initial_data",
    "make_v0",
    "expanded_v0",
]

N_MIN_PACKET = 3  # smallest packet index with exact one-block confinement
_MIN_SUPPORT_POINTS = 4  # lattice frequencies required across [0, 2^-d]


def carrier_frequency(n: int) -> float:
    """Carrier c_n = (17/12) 2^n of the n-th packet."""
    return 17.0 / 12.0 * 2.0**n


@dataclass(frozen=True)
class Bump:
    """Band-limited envelope, stored as matching 1-D profiles.

    ``hat`` holds the Fourier profile on the 1-D frequency axis in fft
    order; ``profile`` holds the physical samples on the 1-D coordinate
    axis.  The envelope is even, real, nonnegative in frequency, and its
    d-dimensional version is the tensor product of ``profile`` along each
    axis.
    """

    d: int
    M: int
    N: int
    hat: np.ndarray
    profile: np.ndarray

    @property
    def plateau_radius(self) -> float:
        return 4.0 ** (-self.d)

    @property
    def support_radius(self) -> float:
        return 2.0 ** (-self.d)

    def value_at_origin(self) -> float:
        return float(self.profile[self.N // 2])

    def envelope(self, grid: Grid) -> Field:
        """Tensor-product envelope prod_i phi(x_i) on the full grid."""
        _check_bump_grid(self, grid)
        vals = self.profile
        for _ in range(grid.d - 1):
            vals = np.multiply.outer(vals, self.profile)
        return Field(grid, vals)


def _check_bump_grid(bump: Bump, grid: Grid) -> None:
    if (bump.d, bump.M, bump.N) != (grid.d, grid.M, grid.N):
        raise ValueError(
            f"bump built for (d={bump.d}, M={bump.M}, N={bump.N}) used on "
            f"(d={grid.d}, M={grid.M}, N={grid.N})"
        )


def make_bump(d: int, grid: Grid) -> Bump:
    """Envelope with Fourier profile 1 on [0, 4^-d], 0 beyond 2^-d.

    Requires at least four lattice frequencies across the support
    [0, 2^-d]; coarser grids cannot resolve the transition region and the
    error suggests raising M.
    """
    if d != grid.d:
        raise ValueError(f"dimension mismatch: d={d} vs grid.d={grid.d}")
    support = 2.0 ** (-d)
    plateau = 4.0 ** (-d)
    n_support = int(math.floor(support / grid.freq_step)) + 1
    if n_support < _MIN_SUPPORT_POINTS:
        raise ValueError(
            f"frequency step 1/(12M)={grid.freq_step:.4g} leaves only "
            f"{n_support} lattice points in [0, {support:.4g}]; raise M "
            f"(need M >= {math.ceil(3.0 / (12.0 * support))})"
        )
    line = make_grid(1, grid.M, grid.N)
    r = np.abs(line.frequency_axes()[0])
    hat = np.where(
        r <= plateau,
        1.0,
        np.where(r >= support, 0.0, smooth_step((support - r) / (support - plateau))),
    )
    profile = inverse_transform(SpectralField(line, hat.astype(np.complex128))).values
    return Bump(d=d, M=grid.M, N=grid.N, hat=hat, profile=profile)


def _carrier_samples(n: int, grid: Grid) -> np.ndarray:
    """sin(c_n x) sampled exactly on the 1-D coordinate axis.

    c_n x_j = 2 pi k_c (j - N/2) / N with the integer k_c = 17 * 2^n * M,
    so the argument is reduced modulo N in exact integer arithmetic before
    a single sin evaluation per point.
    """
    kc = 17 * (1 << n) * grid.M
    j = np.arange(grid.N, dtype=np.int64) - grid.N // 2
    r = ((kc % grid.N) * j) % grid.N
    return np.sin((2.0 * np.pi / grid.N) * r)


def make_fn(n: int, bump: Bump, grid: Grid) -> Field:
    """The n-th packet f_n = phi(x_1) sin(c_n x_1) phi(x_2) ... phi(x_d)."""
    _check_bump_grid(bump, grid)
    if n < N_MIN_PACKET:
        raise ValueError(f"packet index must be >= {N_MIN_PACKET}, got {n}")
    c = carrier_frequency(n)
    if c + bump.support_radius >= grid.nyquist:
        raise ValueError(
            f"carrier {c:.4g} + support {bump.support_radius:.4g} reaches the "
            f"Nyquist frequency {grid.nyquist:.4g}; raise N"
        )
    axis1 = bump.profile * _carrier_samples(n, grid)
    vals = axis1
    for _ in range(grid.d - 1):
        vals = np.multiply.outer(vals, bump.profile)
    return Field(grid, vals)


@dataclass
class InitialData:
    """The constructed triple (S0, u0, v0) and its parameters."""

    grid: Grid
    bump: Bump
    s: float
    n_min: int
    n_max: int
    S0: Field
    u0: Field
    v0: Field

    def packet(self, n: int) -> Field:
        return make_fn(n, self.bump, self.grid)

    def amplitude(self, n: int) -> float:
        """Coefficient 2^{-n(s+2)} of packet n inside S0."""
        return 2.0 ** (-n * (self.s + 2.0))


def make_initial_data(
    s: float,
    n_max: int,
    bump: Bump,
    grid: Grid,
    dealias_fraction: float = 2.0 / 3.0,
    p_intended: float | None = None,
) -> InitialData:
    """Assemble S0, u0 = (1-Laplacian)S0, and the drift v0.

    The packet sum is truncated at n_max, which must not exceed the
    grid's top resolvable block.  When the target integrability p of a
    later probe is known, pass it to get the s > 1 + d/p warning early.
    """
    part = make_partition(grid)
    if not N_MIN_PACKET <= n_max <= part.j_max:
        raise ValueError(
            f"n_max={n_max} outside [{N_MIN_PACKET}, j_max={part.j_max}] for N={grid.N}"
        )
    if p_intended is not None and s <= 1.0 + grid.d / p_intended:
        warnings.warn(
            f"s={s} does not satisfy s > 1 + d/p for p={p_intended}; "
            "probe estimates are outside their hypotheses",
            stacklevel=2,
        )
    vals = np.zeros(grid.shape)
    for n in range(N_MIN_PACKET, n_max + 1):
        vals += 2.0 ** (-n * (s + 2.0)) * make_fn(n, bump, grid).values
    S0 = Field(grid, vals)
    u0 = inverse_transform(apply_multiplier(one_minus_laplacian(), transform(S0)))
    v0 = transport_divergence(u0, S0, dealias_fraction)
    return InitialData(
        grid=grid, bump=bump, s=s, n_min=N_MIN_PACKET, n_max=n_max, S0=S0, u0=u0, v0=v0
    )


def make_v0(data: InitialData, dealias_fraction: float = 2.0 / 3.0) -> Field:
    """Drift v0 = div(u0 (1-u0) grad S0) in conservative form.

    Recomputes from the stored fields through the solver's flux routine;
    identical to ``data.v0`` when called with the construction fraction.
    """
    return transport_divergence(data.u0, data.S0, dealias_fraction)


def expanded_v0(data: InitialData, dealias_fraction: float = 2.0 / 3.0) -> Field:
    """The drift in expanded form (1-2u0) grad S0 . grad u0 + u0(1-u0) Lap S0.

    Agrees with :func:`make_v0` to roundoff once the grid retains every
    pairwise product of packet frequencies below the dealias cutoff; on
    coarser grids the two differ by the truncation the products suffer.
    """
    g = data.grid
    u0, S0 = data.u0, data.S0
    grad_dot = None
    for a in range(g.d):
        dS = inverse_transform(apply_multiplier(derivative(a), transform(S0)))
        du = inverse_transform(apply_multiplier(derivative(a), transform(u0)))
        term = dealiased_product(dS, du, dealias_fraction)
        grad_dot = term if grad_dot is None else grad_dot + term
    lap_S = inverse_transform(apply_multiplier(laplacian(), transform(S0)))
    u_lap = dealiased_product(u0, lap_S, dealias_fraction)
    u2 = dealiased_product(u0, u0, dealias_fraction)
    u2_lap = dealiased_product(u2, lap_S, dealias_fraction)
    u_grad = dealiased_product(u0, grad_dot, dealias_fraction)
    vals = grad_dot.values - 2.0 * u_grad.values + u_lap.values - u2_lap.values
    return Field(g, vals)
