from fractions import Fraction

import pytest

X_GRID = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))


@pytest.fixture
def x_grid():
    return X_GRID


def utilitarian(allocation, instance) -> Fraction:
    return sum(
        (instance.valuation(i).value(allocation.bundle(i)) for i in instance.agents()),
        Fraction(0),
    )
