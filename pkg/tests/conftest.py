from __future__ import annotations

from fractions import Fraction

import pytest

from racktradeoff.config import SystemConfig, parse_and_validate


def build_config(
    k: int,
    d: int,
    racks: list[tuple[int, int]],
    tau,
    file_size=1,
    cheap_cost=1,
    expensive_cost=10,
) -> SystemConfig:
    return parse_and_validate(
        {
            "file_size": str(Fraction(file_size)),
            "k": k,
            "d": d,
            "tau": str(Fraction(tau)),
            "cheap_cost": str(Fraction(cheap_cost)),
            "expensive_cost": str(Fraction(expensive_cost)),
            "racks": [{"nodes": n, "cheap_degree": dc} for n, dc in racks],
        }
    )


@pytest.fixture
def example1() -> SystemConfig:
    # k=4, d=4, two racks of 3 nodes with d_c = 1 and 2, tau=2
    return build_config(4, 4, [(3, 1), (3, 2)], 2)


@pytest.fixture
def example2() -> SystemConfig:
    return build_config(3, 4, [(3, 1), (3, 2)], 2)


@pytest.fixture
def trimming_config() -> SystemConfig:
    # the d=6 config whose highest income exceeds the feasibility bound
    return build_config(3, 6, [(2, 1), (5, 4)], 2)


@pytest.fixture
def three_rack_config() -> SystemConfig:
    return build_config(7, 8, [(3, 1), (4, 2), (4, 3)], Fraction(11, 5))


@pytest.fixture
def fig7_config() -> SystemConfig:
    return build_config(10, 11, [(6, 5), (6, 5)], 2)
