from pathlib import Path
import pytest

from src.error import ErrorHandler
from src.galg import GradedAlgebra
from src.parser import read_algebra

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture(name: str) -> GradedAlgebra:
  handler = ErrorHandler()
  algebra = read_algebra((FIXTURES / f"{name}.alg").read_text(encoding="utf-8"), handler)
  assert algebra is not None, handler.messages()
  return algebra


@pytest.fixture
def fixture_path():
  return lambda name: str(FIXTURES / f"{name}.alg")


@pytest.fixture
def load():
  return load_fixture
