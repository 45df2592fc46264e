import math

import numpy as np
import pytest

import geocast_lab as gl

CARRIER_HZ = 3.6e9
WAVELENGTH_M = gl.SPEED_OF_LIGHT / CARRIER_HZ
SPACING_M = 0.75 * WAVELENGTH_M


@pytest.fixture
def target():
    return gl.PolarPosition(100.0, math.radians(-15.0))


def edge4():
    return gl.edge_layout(4, SPACING_M, CARRIER_HZ)


def altlog4():
    layout = edge4()
    return layout, gl.make_offset_profile(gl.AlternatingLogarithmic(1e6, 1.2), layout)


def altlin4():
    layout = edge4()
    return layout, gl.make_offset_profile(gl.AlternatingLinear(1e6), layout)


def symlin5():
    layout = gl.central_layout(5, SPACING_M, CARRIER_HZ)
    return layout, gl.make_offset_profile(gl.SymmetricLinear(1e6), layout)


def symlog5():
    layout = gl.central_layout(5, SPACING_M, CARRIER_HZ)
    return layout, gl.make_offset_profile(gl.SymmetricLogarithmic(1e6, 1.2), layout)


def all_recipe_cases():
    "One (layout, profile) pair per built-in recipe."
    return [altlog4(), altlin4(), symlin5(), symlog5()]


def two_proportion_z(err1: int, err2: int, n1: int, n2: int) -> float:
    "Pooled two-proportion z statistic."
    p1, p2 = err1 / n1, err2 / n2
    pool = (err1 + err2) / (n1 + n2)
    if pool in (0.0, 1.0):
        return 0.0
    return (p1 - p2) / math.sqrt(pool * (1.0 - pool) * (1.0 / n1 + 1.0 / n2))
