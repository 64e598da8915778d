"""Fourier transforms, exact spectral calculus, projection and dealiasing."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import (
    ScalarField,
    TorusGrid,
    VectorField,
    integer_wavenumbers,
)

__all__ = [
    "SpectralField",
    "forward",
    "inverse",
    "gradient",
    "divergence",
    "laplacian",
    "perp_gradient",
    "leray_project",
    "dealias",
    "dealias_mask",
    "translate",
    "divergence_defect",
]

HERMITIAN_TOL = 1e-12


def _reversed_lattice(coeffs: np.ndarray) -> np.ndarray:
    """coeffs at -k, in the same FFT layout."""
    out = np.flip(coeffs)
    return np.roll(out, shift=[1] * coeffs.ndim, axis=list(range(coeffs.ndim)))


@dataclass(frozen=True)
class SpectralField:
    """Fourier coefficients on the integer lattice, normalized so coeffs[0,...] is the mean.

    When ``real_data`` is set the Hermitian symmetry coeffs(-k) = conj(coeffs(k))
    is verified on construction to 1e-12 relative.
    """

    grid: TorusGrid
    coeffs: np.ndarray
    real_data: bool = True

    def __post_init__(self) -> None:
        arr = np.asarray(self.coeffs, dtype=np.complex128)
        if arr.shape != self.grid.shape:
            raise ValueError(f"coeffs shape {arr.shape} does not match grid shape {self.grid.shape}")
        if arr.flags.writeable:
            arr = arr.copy()
            arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)
        if self.real_data:
            scale = float(np.max(np.abs(arr)))
            if scale > 0.0:
                defect = float(np.max(np.abs(arr - np.conj(_reversed_lattice(arr)))))
                if defect > HERMITIAN_TOL * scale:
                    raise ValueError(f"Hermitian symmetry violated: defect {defect:.3e} at scale {scale:.3e}")


def forward(f: ScalarField) -> SpectralField:
    """Fourier coefficients of f; forward of a constant c has coeffs(0) = c."""
    return SpectralField(f.grid, np.fft.fftn(f.values) / f.grid.size)


def inverse(F: SpectralField) -> ScalarField:
    """Back to grid samples; the (roundoff-sized) imaginary residue is dropped."""
    return ScalarField(F.grid, np.fft.ifftn(F.coeffs * F.grid.size).real)


@lru_cache(maxsize=64)
def _derivative_wavenumbers(grid: TorusGrid) -> tuple[np.ndarray, ...]:
    # Nyquist column zeroed per axis: the lone +/-N/2 mode has no symmetric
    # partner, so an odd derivative symbol would break real-to-real symmetry.
    out = []
    nyq = grid.points_per_axis // 2
    for a in integer_wavenumbers(grid):
        a = a.copy()
        a[np.abs(a) == nyq] = 0.0
        a.flags.writeable = False
        out.append(a)
    return tuple(out)


@lru_cache(maxsize=64)
def _derivative_square_modulus(grid: TorusGrid) -> np.ndarray:
    ksq = sum(a * a for a in _derivative_wavenumbers(grid))
    ksq = np.ascontiguousarray(np.broadcast_to(ksq, grid.shape))
    ksq.flags.writeable = False
    return ksq


@lru_cache(maxsize=64)
def dealias_mask(grid: TorusGrid) -> np.ndarray:
    """Boolean mask keeping modes with every |k_j| <= N/3 (two-thirds rule)."""
    cut = grid.points_per_axis / 3.0
    keep = np.ones(grid.shape, dtype=bool)
    for a in integer_wavenumbers(grid):
        keep &= np.broadcast_to(np.abs(a) <= cut, grid.shape)
    keep = np.ascontiguousarray(keep)
    keep.flags.writeable = False
    return keep


def dealias(F: SpectralField) -> SpectralField:
    """Zero every coefficient with any |k_j| > N/3; idempotent."""
    return SpectralField(F.grid, np.where(dealias_mask(F.grid), F.coeffs, 0.0), real_data=F.real_data)


def gradient(f: ScalarField) -> VectorField:
    """Exact spectral gradient: multiplication by i 2 pi k per axis."""
    fh = np.fft.fftn(f.values)
    comps = []
    for k in _derivative_wavenumbers(f.grid):
        comps.append(np.fft.ifftn(2j * np.pi * k * fh).real)
    return VectorField.from_arrays(f.grid, comps)


def divergence(v: VectorField) -> ScalarField:
    out = np.zeros(v.grid.shape, dtype=np.complex128)
    for k, c in zip(_derivative_wavenumbers(v.grid), v.components):
        out += 2j * np.pi * k * np.fft.fftn(c.values)
    return ScalarField(v.grid, np.fft.ifftn(out).real)


def laplacian(f: ScalarField) -> ScalarField:
    fh = np.fft.fftn(f.values)
    fh *= -4.0 * np.pi**2 * _derivative_square_modulus(f.grid)
    return ScalarField(f.grid, np.fft.ifftn(fh).real)


def perp_gradient(psi: ScalarField) -> VectorField:
    """Velocity (-d2 psi, d1 psi) of a stream function; solenoidal by construction.

    In three dimensions the flow is extended as vortex columns: the third
    component is zero and nothing depends on x3 beyond what psi carries.
    """
    if psi.grid.dim < 2:
        raise ValueError("perpendicular gradient requires dim >= 2")
    g = gradient(psi)
    comps = [-g.components[1].values, g.components[0].values]
    while len(comps) < psi.grid.dim:
        comps.append(np.zeros(psi.grid.shape))
    return VectorField.from_arrays(psi.grid, comps, divergence_free=True)


def divergence_defect(v: VectorField) -> float:
    """max |spectral divergence| relative to the largest component modulus."""
    scale = v.max_abs()
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(divergence(v).values))) / scale


def leray_project(v: VectorField) -> VectorField:
    """Orthogonal projection onto divergence-free fields: vhat(k) -> vhat(k) - k (k.vhat)/|k|^2.

    The k = 0 coefficient (the mean) is untouched; a constant field is
    divergence-free.  The projector uses the same Nyquist-zeroed wavenumbers
    as the derivative operators, so its output is divergence-free in exactly
    the sense the divergence operator measures.  In one dimension only
    constants are admissible.
    """
    grid = v.grid
    if grid.dim == 1:
        vals = v.components[0].values
        if float(np.max(vals) - np.min(vals)) <= 1e-13 * max(1.0, float(np.max(np.abs(vals)))):
            return VectorField(grid, v.components, divergence_free=True, notes=v.notes)
        raise ValueError("leray projection is trivial in one dimension: only constant fields are divergence-free")
    ks = _derivative_wavenumbers(grid)
    hats = [np.fft.fftn(c.values) for c in v.components]
    ksq = np.broadcast_to(sum(k * k for k in ks), grid.shape).copy()
    zero = ksq == 0.0  # mean mode and pure-Nyquist planes: invisible to derivatives
    ksq[zero] = 1.0
    dot = sum(k * h for k, h in zip(ks, hats)) / ksq
    comps = [np.fft.ifftn(h - k * dot).real for k, h in zip(ks, hats)]
    return VectorField.from_arrays(grid, comps, divergence_free=True, notes=v.notes)


def translate(f: ScalarField, shift) -> ScalarField:
    """g(x) = f(x - shift), computed exactly through the phase factor e^{-2 pi i k.shift}."""
    shift = np.atleast_1d(np.asarray(shift, dtype=np.float64))
    if shift.size != f.grid.dim:
        raise ValueError("shift dimension does not match the grid")
    fh = np.fft.fftn(f.values)
    phase = np.zeros(f.grid.shape)
    for k, s in zip(integer_wavenumbers(f.grid), shift):
        phase = phase + k * s
    fh = fh * np.exp(-2j * np.pi * phase)
    return ScalarField(f.grid, np.fft.ifftn(fh).real)
