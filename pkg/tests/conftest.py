import numpy as np
import pytest

from singell import (CoefficientField, ConstantDatum, IndicatorDatum,
                     ProblemSpec, make_uniform_grid)


def interval_spec(gamma, cells, lo=-1.0, hi=1.0, value=1.0,
                  support="strictly_positive"):
    grid = make_uniform_grid(lo, hi, cells)
    return ProblemSpec(grid, CoefficientField.identity(grid),
                       ConstantDatum(value), gamma=gamma, support=support)


def matched_spec(gamma, cells):
    """Indicator datum on (-1, 1) inside the interval (-2, 2)."""
    grid = make_uniform_grid(-2.0, 2.0, cells)
    return ProblemSpec(grid, CoefficientField.identity(grid),
                       IndicatorDatum(1.0, -1.0, 1.0), gamma=gamma,
                       support="compact")


def square_spec(gamma, cells):
    grid = make_uniform_grid((0.0, 0.0), (1.0, 1.0), (cells, cells))
    return ProblemSpec(grid, CoefficientField.identity(grid),
                       ConstantDatum(1.0), gamma=gamma,
                       support="strictly_positive")


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
