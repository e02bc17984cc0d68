import os
import numpy as np
import pytest
from typer.testing import CliRunner

# Keep test runs independent of any local .env
os.environ["BUBBLEWALK_THREADS"] = "2"
os.environ["BUBBLEWALK_REPLICA_CHUNK"] = "64"

from bubblewalk.models.scaling import ScalingRule  # noqa: E402
from bubblewalk.services.graph_service import GraphService  # noqa: E402
from bubblewalk.services.group_service import GroupService  # noqa: E402
from bubblewalk.services.orbit_service import OrbitService  # noqa: E402
from bubblewalk.services.wreath_service import WreathService  # noqa: E402


@pytest.fixture(scope="session")
def fig1_rule() -> ScalingRule:
    """The small explicit rule alpha = (2, 3, 4)."""
    return ScalingRule.explicit(2, 3, 4)


@pytest.fixture(scope="session")
def canonical_rule() -> ScalingRule:
    return ScalingRule.canonical()


@pytest.fixture
def rng() -> np.random.Generator:
    """Fresh seeded generator per test."""
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def fig1_graph(fig1_rule) -> GraphService:
    return GraphService(fig1_rule)


@pytest.fixture(scope="session")
def canonical_graph(canonical_rule) -> GraphService:
    return GraphService(canonical_rule)


@pytest.fixture(scope="session")
def fig1_orbits(fig1_rule) -> OrbitService:
    return OrbitService(fig1_rule)


@pytest.fixture(scope="session")
def canonical_orbits(canonical_rule) -> OrbitService:
    return OrbitService(canonical_rule)


@pytest.fixture(scope="session")
def fig1_group(fig1_rule) -> GroupService:
    return GroupService(fig1_rule)


@pytest.fixture(scope="session")
def canonical_group(canonical_rule) -> GroupService:
    return GroupService(canonical_rule)


@pytest.fixture(scope="session")
def fig1_wreath(fig1_rule) -> WreathService:
    return WreathService(fig1_rule)


@pytest.fixture(scope="session")
def canonical_wreath(canonical_rule) -> WreathService:
    return WreathService(canonical_rule)


@pytest.fixture
def cli_runner() -> CliRunner:
    """Typer test runner; result.stdout holds only command output."""
    return CliRunner()
