"""Shared fixtures: grids, processes, and the synthetic growth dataset."""

import numpy as np
import pytest

import funcgrad as fg
from funcgrad.grid import trapezoid_weights
from funcgrad.ingest import LongitudinalTable

BERKELEY_AGES = np.array(
    [1, 1.25, 1.5, 1.75, 2, 3, 4, 5, 6, 7, 8, 8.5, 9, 9.5, 10.0]
)


@pytest.fixture(scope="session")
def grid101():
    return fg.Grid.uniform(101)


@pytest.fixture(scope="session")
def grid51():
    return fg.Grid.uniform(51)


@pytest.fixture(scope="session")
def expdecay_process(grid101):
    """Six-component process with eigenvalues exp(-j)."""
    return fg.ProcessSpec(
        grid=grid101, eigenvalues=np.exp(-np.arange(1, 7, dtype=float))
    )


@pytest.fixture(scope="session")
def linear_functional(expdecay_process):
    """g(x) = integral of (1.5*basis1 - 0.5*basis2) * x."""
    proc = expdecay_process
    slope = fg.Curve(proc.grid, 1.5 * proc.basis[0] - 0.5 * proc.basis[1])
    return fg.FunctionalSpec(kind="linear", slope=slope)


def _velocity_modes(midpoints: np.ndarray) -> np.ndarray:
    # three smooth shapes, Gram-Schmidt-orthonormalized under the midgrid
    # quadrature so the population variance shares are exact
    r = (midpoints - midpoints[0]) / (midpoints[-1] - midpoints[0])
    w = trapezoid_weights(r)
    raw = np.vstack(
        [
            np.exp(-2.0 * r) - 0.5 * r,
            np.sin(np.pi * r) - 0.8 * r,
            np.cos(2 * np.pi * r) * (0.5 + r),
        ]
    )
    basis = []
    for v in raw:
        u = v.copy()
        for b in basis:
            u = u - (w @ (u * b)) * b
        basis.append(u / np.sqrt(w @ (u * u)))
    return np.vstack(basis)


def synthetic_growth_table(n: int = 39, seed: int = 2024) -> LongitudinalTable:
    """Deterministic growth-study-format data: 15 ages to 10, plus age 18.

    Velocities on the age midgrid are a declining mean plus three
    orthonormal modes with variance shares near (76%, 18%, 6%); heights
    integrate the velocities exactly, so difference quotients recover
    them. The age-18 column is a linear-in-scores adult height.
    """
    rng = np.random.default_rng([seed, 3])
    ages = np.concatenate([BERKELEY_AGES, [18.0]])
    mid = (BERKELEY_AGES[:-1] + BERKELEY_AGES[1:]) / 2
    vbar = 5.5 + 12.5 * np.exp(-0.55 * (mid - mid[0]))
    modes = _velocity_modes(mid)
    lams = np.array([3.24, 0.68, 0.22])
    a = rng.uniform(-np.sqrt(3), np.sqrt(3), size=(n, 3)) * np.sqrt(lams)
    velocities = vbar + a @ modes

    heights10 = np.empty((n, len(BERKELEY_AGES)))
    heights10[:, 0] = 74.0 + rng.uniform(-2.0, 2.0, size=n)
    steps = np.diff(BERKELEY_AGES)
    for j in range(len(steps)):
        heights10[:, j + 1] = heights10[:, j] + velocities[:, j] * steps[j]
    adult = 174.0 + 1.2 * a[:, 0] - 2.2 * a[:, 1] + 0.8 * a[:, 2]
    adult += 0.8 * rng.standard_normal(n)
    adult = np.maximum(adult, heights10[:, -1] + 5.0)
    heights = np.column_stack([heights10, adult])
    ids = [f"b{i + 1:02d}" for i in range(n)]
    return LongitudinalTable(ages=ages, heights=heights, ids=ids)


@pytest.fixture(scope="session")
def growth_table():
    return synthetic_growth_table()


def write_growth_csvs(table: LongitudinalTable, directory) -> tuple[str, str]:
    """Write heights.csv / ages.csv in the documented demo schema."""
    import csv
    import os

    heights_path = os.path.join(str(directory), "heights.csv")
    ages_path = os.path.join(str(directory), "ages.csv")
    with open(ages_path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["age"])
        for age in table.ages:
            out.writerow([format(age, ".17g")])
    with open(heights_path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["id", *(f"a{j + 1}" for j in range(len(table.ages)))])
        for i, name in enumerate(table.ids):
            out.writerow([name, *(format(v, ".17g") for v in table.heights[i])])
    return heights_path, ages_path
