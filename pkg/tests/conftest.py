"""Shared helpers: deterministic trig-polynomial fields usable across grids."""

from __future__ import annotations

import numpy as np
import pytest

from advdiff.grid import ScalarField, TorusGrid


def trig_field(grid: TorusGrid, terms) -> ScalarField:
    """Sum of cos/sin modes; the same `terms` give the same function on any grid.

    terms: iterable of (k_vector, cos_amplitude, sin_amplitude).
    """
    coords = grid.coordinate_mesh()
    vals = np.zeros(grid.shape)
    for k, a_cos, a_sin in terms:
        arg = np.zeros(grid.shape)
        for kj, c in zip(k, coords):
            arg = arg + 2.0 * np.pi * kj * c
        vals = vals + a_cos * np.cos(arg) + a_sin * np.sin(arg)
    return ScalarField(grid, vals)


def random_terms(rng: np.random.Generator, dim: int, max_mode: int, count: int):
    terms = []
    for _ in range(count):
        k = tuple(int(rng.integers(-max_mode, max_mode + 1)) for _ in range(dim))
        if all(kj == 0 for kj in k):
            k = (1,) + (0,) * (dim - 1)
        terms.append((k, float(rng.normal()), float(rng.normal())))
    return terms


def random_field(grid: TorusGrid, seed: int, max_mode: int = 5, count: int = 8) -> ScalarField:
    rng = np.random.default_rng(seed)
    return trig_field(grid, random_terms(rng, grid.dim, max_mode, count))


@pytest.fixture
def grid64():
    return TorusGrid(2, 64)


@pytest.fixture
def grid32():
    return TorusGrid(2, 32)


@pytest.fixture
def line256():
    return TorusGrid(1, 256)
