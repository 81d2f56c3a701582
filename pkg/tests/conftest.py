import pytest

from kbsm.annulus import Calculator
from kbsm.annulus.laurent import A_pow
from kbsm.annulus.words import Annulus, FiberedTorus


@pytest.fixture
def test_calculator():
    """Create a calculator configured from environment variables, without cache."""
    return Calculator(use_cache=False)


@pytest.fixture
def test_calculator_with_cache():
    """Create a calculator with caching enabled."""
    return Calculator(use_cache=True, cache_dir="test_cache")


@pytest.fixture
def annulus_zero():
    """Annulus basis Sigma_0."""
    return Annulus(0)


@pytest.fixture
def torus_five():
    """Fibered torus with beta = 5, so nu = 2."""
    return FiberedTorus(5)


@pytest.fixture
def delta():
    """Value of an arrowless trivial circle."""
    return A_pow(2, -1) + A_pow(-2, -1)


@pytest.fixture
def sample_diagram_text():
    """A one-arrow trivial circle just outside an essential strand."""
    return "# circle outside a strand\nstrands 1\ncap 2\na+ 2\ncup 2\n"


@pytest.fixture(scope="session", autouse=True)
def cleanup_test_cache():
    """Clean up test cache after tests."""
    yield
    import shutil
    from pathlib import Path

    test_cache_dir = Path("test_cache")
    if test_cache_dir.exists():
        shutil.rmtree(test_cache_dir)
