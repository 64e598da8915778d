"""Uniform periodic grids, field containers and norms on the flat torus [0,1)^d."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "TorusGrid",
    "ScalarField",
    "VectorField",
    "geodesic_distance",
    "lp_norm",
    "h_norm",
    "integer_wavenumbers",
    "wavenumber_square_modulus",
    "wrapped_displacement",
]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class TorusGrid:
    """Uniform N^d sampling of the torus identified with the cube [0,1)^d.

    N must be a power of two (N >= 4); the transform and the 2/3 dealiasing
    rule rely on it.  Index arithmetic wraps modulo N on every axis, so the
    grid carries no boundary.
    """

    dim: int
    points_per_axis: int

    def __post_init__(self) -> None:
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        n = self.points_per_axis
        if n < 4 or not _is_power_of_two(n):
            raise ValueError(f"points_per_axis must be a power of two >= 4, got {n}")

    @property
    def spacing(self) -> float:
        return 1.0 / self.points_per_axis

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def size(self) -> int:
        return self.points_per_axis**self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    def axis_coordinates(self) -> np.ndarray:
        """Coordinates 0, h, 2h, ... of one axis."""
        return np.arange(self.points_per_axis) * self.spacing

    def coordinate_mesh(self) -> tuple[np.ndarray, ...]:
        """Broadcastable (sparse) coordinate arrays, one per axis."""
        axes = [self.axis_coordinates()] * self.dim
        return tuple(np.meshgrid(*axes, indexing="ij", sparse=True))


@dataclass(frozen=True)
class ScalarField:
    """Real samples of a scalar function at the grid points.

    Values are an immutable snapshot: the array is copied on construction
    unless it is already read-only, and every operation returns a new field.
    Construction rejects non-finite values.
    """

    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.shape != self.grid.shape:
            raise ValueError(f"values shape {arr.shape} does not match grid shape {self.grid.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("field values must be finite (no NaN/Inf)")
        if arr.flags.writeable:
            arr = arr.copy()
            arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_function(cls, grid: TorusGrid, fn) -> "ScalarField":
        """Sample fn(*coords) on the grid; fn must broadcast over coordinate arrays."""
        mesh = grid.coordinate_mesh()
        return cls(grid, np.broadcast_to(fn(*mesh), grid.shape).astype(np.float64))

    @classmethod
    def constant(cls, grid: TorusGrid, value: float) -> "ScalarField":
        return cls(grid, np.full(grid.shape, float(value)))

    def mean(self) -> float:
        return float(np.mean(self.values))

    def __add__(self, other: "ScalarField") -> "ScalarField":
        self._check_same_grid(other)
        return ScalarField(self.grid, self.values + other.values)

    def __sub__(self, other: "ScalarField") -> "ScalarField":
        self._check_same_grid(other)
        return ScalarField(self.grid, self.values - other.values)

    def __mul__(self, other) -> "ScalarField":
        if isinstance(other, ScalarField):
            self._check_same_grid(other)
            return ScalarField(self.grid, self.values * other.values)
        return ScalarField(self.grid, self.values * float(other))

    __rmul__ = __mul__

    def __neg__(self) -> "ScalarField":
        return ScalarField(self.grid, -self.values)

    def _check_same_grid(self, other: "ScalarField") -> None:
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")


@dataclass(frozen=True)
class VectorField:
    """dim-tuple of scalar components sharing one grid.

    ``divergence_free`` is a certification set by producers (the projection
    and the catalog), never guessed.  ``notes`` is a free-form warning
    channel, e.g. for under-resolved singularities.
    """

    grid: TorusGrid
    components: tuple[ScalarField, ...]
    divergence_free: bool = False
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        comps = tuple(self.components)
        if len(comps) != self.grid.dim:
            raise ValueError(f"expected {self.grid.dim} components, got {len(comps)}")
        for c in comps:
            if c.grid != self.grid:
                raise ValueError("all components must share the vector field's grid")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "notes", tuple(self.notes))

    @classmethod
    def from_arrays(cls, grid: TorusGrid, arrays, **kwargs) -> "VectorField":
        return cls(grid, tuple(ScalarField(grid, a) for a in arrays), **kwargs)

    def magnitude(self) -> ScalarField:
        sq = sum(c.values**2 for c in self.components)
        return ScalarField(self.grid, np.sqrt(sq))

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(c.values))) for c in self.components)

    def __add__(self, other: "VectorField") -> "VectorField":
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")
        return VectorField(self.grid, tuple(a + b for a, b in zip(self.components, other.components)))

    def __mul__(self, factor: float) -> "VectorField":
        return VectorField(
            self.grid,
            tuple(c * float(factor) for c in self.components),
            divergence_free=self.divergence_free,
            notes=self.notes,
        )

    __rmul__ = __mul__


def geodesic_distance(x, y) -> float:
    """Distance on the torus: min over integer shifts k with |k| <= 2 of |x - y - k|.

    Coordinates must lie in [0,1)^d.  The shift search radius follows the
    definition literally even though |k| <= 1 already suffices on [0,1)^d.
    """
    xv = np.atleast_1d(np.asarray(x, dtype=np.float64))
    yv = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if xv.shape != yv.shape or xv.ndim != 1 or not 1 <= xv.size <= 3:
        raise ValueError("x and y must be points of equal dimension 1, 2 or 3")
    for v in (xv, yv):
        if np.any(v < 0.0) or np.any(v >= 1.0):
            raise ValueError("coordinates must lie in [0,1)")
    best = math.inf
    for k in itertools.product(range(-2, 3), repeat=xv.size):
        kv = np.asarray(k, dtype=np.float64)
        if kv @ kv > 4.0:
            continue
        best = min(best, float(np.linalg.norm(xv - yv - kv)))
    return best


def wrapped_displacement(coords, center) -> list[np.ndarray]:
    """Per-axis displacement coords - center wrapped to [-1/2, 1/2)."""
    return [np.mod(c - ci + 0.5, 1.0) - 0.5 for c, ci in zip(coords, center)]


def _lp_from_values(values: np.ndarray, p: float, cell_volume: float) -> float:
    if math.isinf(p):
        return float(np.max(np.abs(values)))
    if p == 1.0:
        s = np.sum(np.abs(values))
    elif p == 2.0:
        s = np.sum(values * values)
    else:
        s = np.sum(np.abs(values) ** p)
    return float((s * cell_volume) ** (1.0 / p))


def lp_norm(f: ScalarField, p: float) -> float:
    """L^p norm by the rectangle rule; p = inf returns the grid maximum of |f|.

    The rectangle rule is spectrally accurate for smooth periodic integrands,
    and the grid maximum slightly under-estimates the true sup.
    """
    p = float(p)
    if not (p >= 1.0 or math.isinf(p)):
        raise ValueError(f"p must satisfy p >= 1 or p = inf, got {p}")
    return _lp_from_values(f.values, p, f.grid.cell_volume)


@lru_cache(maxsize=64)
def _wavenumber_cache(grid: TorusGrid) -> tuple[tuple[np.ndarray, ...], np.ndarray]:
    n = grid.points_per_axis
    k1 = (np.fft.fftfreq(n) * n).astype(np.float64)  # lattice {-N/2, ..., N/2-1} reordered
    axes = np.meshgrid(*([k1] * grid.dim), indexing="ij", sparse=True)
    ksq = sum(a * a for a in axes)
    ksq = np.ascontiguousarray(np.broadcast_to(ksq, grid.shape))
    ksq.flags.writeable = False
    frozen = []
    for a in axes:
        a = a.copy()
        a.flags.writeable = False
        frozen.append(a)
    return tuple(frozen), ksq


def integer_wavenumbers(grid: TorusGrid) -> tuple[np.ndarray, ...]:
    """Broadcastable integer frequency lattice, one array per axis.

    Frequencies follow the FFT layout; only |k| enters the norms and the
    projector, so the sign convention at the Nyquist plane is immaterial.
    """
    return _wavenumber_cache(grid)[0]


def wavenumber_square_modulus(grid: TorusGrid) -> np.ndarray:
    """|k|^2 on the full integer lattice (dense array of grid shape)."""
    return _wavenumber_cache(grid)[1]


def h_norm(f: ScalarField, s: int) -> float:
    """Sobolev norm through the Fourier multiplier (1 + 4 pi^2 |k|^2)^s, s in {-1, +1}.

    s = +1 gives the H^1 norm and s = -1 the H^-1 norm.  The multiplier norm
    is equivalent (with dimensional constants) to the duality-pairing H^-1
    norm; all tolerances in this package are stated for the multiplier form.
    """
    if s not in (-1, 1):
        raise ValueError(f"s must be -1 or +1, got {s}")
    coeffs = np.fft.fftn(f.values) / f.grid.size
    mult = (1.0 + 4.0 * np.pi**2 * wavenumber_square_modulus(f.grid)) ** s
    return float(np.sqrt(np.sum(mult * (coeffs.real**2 + coeffs.imag**2))))
