import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from eacase import corpus


@pytest.fixture
def healthcare():
    return corpus.load_fixture("healthcare")


@pytest.fixture
def healthcare_review():
    return corpus.load_fixture("healthcare-review")


@pytest.fixture
def toulmin():
    return corpus.load_fixture("fig7-toulmin")


@pytest.fixture
def rng():
    return random.Random(20260818)
