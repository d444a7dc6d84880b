from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from fillvol.chain_complex import builtin_complex

settings.register_profile("fillvol", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("fillvol")


@pytest.fixture(scope="session")
def z7():
    return builtin_complex("cyclic", k=7, n=3)


@pytest.fixture(scope="session")
def z2():
    return builtin_complex("z2")


@pytest.fixture(scope="session")
def z2q():
    return builtin_complex("z2", ring="Q")
