"""Dyadic frequency decomposition and Besov norms on the periodic lattice.

The low cutoff chi is radial, identically 1 on |xi| <= 3/4 and identically
0 on |xi| >= 4/3, built from the C^infinity step
h(t) = psi(t) / (psi(t) + psi(1-t)) with psi(t) = exp(-1/t) for t > 0.
The annulus window is the telescoping difference phi(xi) = chi(xi/2) - chi(xi),
supported in 3/4 <= |xi| <= 8/3 and identically 1 on 4/3 <= |xi| <= 3/2.
Block j applies phi(2^-j xi); block -1 applies chi.  Because h is exactly
0 and 1 outside the open transition interval, supports are exact and
windows two or more octaves apart multiply to exactly zero.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .spectral import (
    Field,
    Grid,
    SpectralField,
    dealiased_product,
    derivative,
    apply_multiplier,
    inverse_transform,
    lp_norm,
    transform,
)

__all__ = [
    "smooth_step",
    "low_cutoff_profile",
    "annulus_profile",
    "DyadicPartition",
    "make_partition",
    "lp_block",
    "BlockDecomposition",
    "decompose",
    "BesovParams",
    "BesovNormResult",
    "besov_norm",
    "commutator",
]

# largest lattice set where the partition sums to exactly 1 is
# |xi| <= RESOLVED_FACTOR * 2**j_max
RESOLVED_FACTOR = 1.5

_MASK_CACHE_MAX_SIZE = 1 << 20  # cache block masks only for grids up to 1M samples


def smooth_step(t: np.ndarray | float) -> np.ndarray:
    """C^infinity monotone step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=np.float64)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0.0, np.exp(-1.0 / np.where(t > 0.0, t, 1.0)), 0.0)
        b = np.where(t < 1.0, np.exp(-1.0 / np.where(t < 1.0, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def low_cutoff_profile(r: np.ndarray | float) -> np.ndarray:
    """chi as a function of the radius |xi|: 1 on [0, 3/4], 0 on [4/3, inf)."""
    r = np.asarray(r, dtype=np.float64)
    return smooth_step((4.0 / 3.0 - r) / (4.0 / 3.0 - 3.0 / 4.0))


def annulus_profile(r: np.ndarray | float) -> np.ndarray:
    """phi(r) = chi(r/2) - chi(r); nonnegative, supported in [3/4, 8/3]."""
    r = np.asarray(r, dtype=np.float64)
    return low_cutoff_profile(r / 2.0) - low_cutoff_profile(r)


@dataclass(frozen=True)
class DyadicPartition:
    """Block windows chi(xi), phi(2^-j xi) for j = 0..j_max on a grid.

    j_max is the largest j with (3/2)*2^j strictly below the grid Nyquist
    frequency, so the partition sums to 1 on every lattice point with
    |xi| <= (3/2)*2^j_max.
    """

    grid: Grid
    j_max: int = field(init=False)

    def __post_init__(self) -> None:
        # (3/2) * 2^j < N/(24M)  <=>  36 * M * 2^j < N, exact in integers
        j = -1
        while 36 * self.grid.M * (1 << (j + 1)) < self.grid.N:
            j += 1
        if j < 0:
            raise ValueError(
                f"grid too coarse for any dyadic block (N={self.grid.N}, M={self.grid.M})"
            )
        object.__setattr__(self, "j_max", j)
        object.__setattr__(self, "_mask_cache", {})

    def _radius(self) -> np.ndarray:
        cache = self.grid._cache
        if "xi_radius" not in cache:
            cache["xi_radius"] = np.sqrt(self.grid.frequency_norm2())
        return cache["xi_radius"]

    def block_window(self, j: int) -> np.ndarray:
        """Window values on the lattice for block j (j = -1 is the low ball)."""
        if j < -1 or j > self.j_max:
            raise ValueError(f"block index {j} outside [-1, {self.j_max}]")
        cache_ok = self.grid.N**self.grid.d <= _MASK_CACHE_MAX_SIZE
        if cache_ok and j in self._mask_cache:
            return self._mask_cache[j]
        r = self._radius()
        w = low_cutoff_profile(r) if j == -1 else annulus_profile(r / float(2**j))
        if cache_ok:
            self._mask_cache[j] = w
        return w

    def resolved_mass_fraction(self, F: SpectralField) -> float:
        """l2 coefficient mass fraction beyond (3/2)*2^j_max."""
        r = self._radius()
        c2 = np.abs(F.coefficients) ** 2
        total = float(np.sum(c2))
        if total == 0.0:
            return 0.0
        return float(np.sum(c2[r > RESOLVED_FACTOR * 2**self.j_max]) / total)


def make_partition(grid: Grid) -> DyadicPartition:
    return DyadicPartition(grid)


def lp_block(part: DyadicPartition, f: Field, j: int) -> Field:
    """The j-th dyadic block of f as a physical field."""
    F = transform(f)
    return inverse_transform(SpectralField(part.grid, F.coefficients * part.block_window(j)))


@dataclass
class BlockDecomposition:
    part: DyadicPartition
    blocks: list[Field]  # index 0 is block -1
    resolved: bool
    unresolved_fraction: float

    def block(self, j: int) -> Field:
        return self.blocks[j + 1]

    def reconstruct(self) -> Field:
        out = self.blocks[0]
        for b in self.blocks[1:]:
            out = out + b
        return out


_RESOLVED_TOL = 1e-12


def decompose(part: DyadicPartition, f: Field) -> BlockDecomposition:
    """All blocks j = -1..j_max of f, plus a resolvedness flag.

    When the unresolved coefficient mass fraction exceeds 1e-12 the block
    sum no longer reconstructs f and a warning is emitted.
    """
    F = transform(f)
    blocks = [
        inverse_transform(SpectralField(part.grid, F.coefficients * part.block_window(j)))
        for j in range(-1, part.j_max + 1)
    ]
    frac = part.resolved_mass_fraction(F)
    resolved = frac <= _RESOLVED_TOL
    if not resolved:
        warnings.warn(
            f"field has {frac:.3e} of its spectral mass beyond the resolved band",
            stacklevel=2,
        )
    return BlockDecomposition(part, blocks, resolved, frac)


@dataclass(frozen=True)
class BesovParams:
    """Besov space indices B^s_{p,r}; r = inf gives the sup over blocks."""

    s: float
    p: float
    r: float = math.inf

    def __post_init__(self) -> None:
        if self.p < 1:
            raise ValueError(f"p must be >= 1 or inf, got {self.p}")
        if self.r < 1:
            raise ValueError(f"r must be >= 1 or inf, got {self.r}")


@dataclass
class BesovNormResult:
    value: float
    js: np.ndarray  # block indices, -1..j_max
    profile: np.ndarray  # 2^{js} ||block_j f||_p per block
    resolved: bool

    def __float__(self) -> float:
        return self.value


def besov_norm(part: DyadicPartition, f: Field, params: BesovParams) -> BesovNormResult:
    """Dyadic Besov norm together with its per-block profile.

    profile[i] = 2^{s*j} * ||Delta_j f||_{L^p} for j = js[i]; the norm is the
    l^r aggregation of the profile (sup for r = inf).  Block -1 is always
    included.
    """
    F = transform(f)
    frac = part.resolved_mass_fraction(F)
    resolved = frac <= _RESOLVED_TOL
    if not resolved:
        warnings.warn(
            f"besov_norm on under-resolved field ({frac:.3e} mass beyond band)",
            stacklevel=2,
        )
    js = np.arange(-1, part.j_max + 1)
    profile = np.empty(len(js))
    for i, j in enumerate(js):
        blk = inverse_transform(
            SpectralField(part.grid, F.coefficients * part.block_window(int(j)))
        )
        profile[i] = 2.0 ** (params.s * j) * lp_norm(blk, params.p)
    if params.r == math.inf:
        value = float(np.max(profile))
    else:
        value = float(np.sum(profile**params.r) ** (1.0 / params.r))
    return BesovNormResult(value, js, profile, resolved)


def commutator(
    part: DyadicPartition,
    j: int,
    velocity: Sequence[Field],
    f: Field,
    fraction: float = 2.0 / 3.0,
) -> Field:
    """Block commutator [Delta_j, v . grad] f = Delta_j(v . grad f) - v . Delta_j grad f.

    All pointwise products are dealiased with the given fraction.
    """
    g = part.grid
    if len(velocity) != g.d:
        raise ValueError(f"velocity must have {g.d} components, got {len(velocity)}")
    grad = [inverse_transform(apply_multiplier(derivative(a), transform(f))) for a in range(g.d)]
    adv = dealiased_product(velocity[0], grad[0], fraction)
    for a in range(1, g.d):
        adv = adv + dealiased_product(velocity[a], grad[a], fraction)
    first = lp_block(part, adv, j)
    second = dealiased_product(velocity[0], lp_block(part, grad[0], j), fraction)
    for a in range(1, g.d):
        second = second + dealiased_product(velocity[a], lp_block(part, grad[a], j), fraction)
    return first - second
