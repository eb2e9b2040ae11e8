import pytest

from havnfp.instgen import GeneratorConfig, generate

from helpers import two_cluster_instance


@pytest.fixture
def tiny():
    return two_cluster_instance()


@pytest.fixture(scope="session")
def paper_style_instance():
    """A generated 50-request instance with room for protection."""
    return generate(GeneratorConfig(requests=50, seed=7, multiplier=2.0))
