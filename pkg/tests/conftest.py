"""Shared fixtures: the reference lattice and random configuration draws."""

import pytest

from qzw.lattice import LatticeParams
from qzw.verification import interlacing_child, random_config  # noqa: F401

__all__ = ["interlacing_child", "lat", "random_config"]


@pytest.fixture
def lat():
    return LatticeParams(q=0.5, zeta_minus=-1.0, zeta_plus=1.0)
