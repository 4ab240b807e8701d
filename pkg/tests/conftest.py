import gc
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from nexalc.parser import parse_assertion, parse_gci  # noqa: E402

F = Fraction

# the three worked knowledge bases used across suites: (GCIs, assertion expected valid)
EXAMPLE_KBS = {
    1: (["A [= all R . (A (-) 0.2)",
         "A (-) 0.2 [= B (-) 0.3",
         "B [= (all R . B) (-) 0.2"],
        "(!(A (-) 0.5)) | ((all R . B) (-) 0.2) >= 0.8"),
    2: (["all IFW . FootballFan [= FootballFan",
         "all IFW . (!FootballFan (-) 0.4) [= !FootballFan (+) 0.2",
         "some IFW . (SportsFan (-) 0.3) [= SportsFan (+) 0.2",
         "FootballFan [= SportsFan",
         "FootballFan (-) 0.3 [= all IFW . (FootballFan (+) 0.2)"],
        "(some IFW . (!FootballFan) (+) 0.4) | SportsFan >= 0.7"),
    3: (["some CitedBy . Influence [= Influence (+) 0.2",
         "some CW . (Influence (-) 0.4) [= Influence",
         "all CW . Influence [= Influence",
         "Influence [= some CitedBy . (Influence (+) 0.3)"],
        "(all CW . (!Influence (+) 0.4) (+) 0.6) | (some CitedBy . (Influence (+) 0.3)) >= 0.8"),
}


def example_kb(n):
    gcis, assertion = EXAMPLE_KBS[n]
    return tuple(parse_gci(g) for g in gcis), parse_assertion(assertion)


@pytest.fixture
def ex1():
    return example_kb(1)


@pytest.fixture
def shift_tbox():
    """Single GCI forcing B to exceed A by at least 1/10."""
    return (parse_gci("A (-) 1/5 [= B (-) 3/10"),)


@pytest.fixture
def release_memory():
    yield
    gc.collect()


settings.register_profile("nexalc", deadline=None, print_blob=True)
settings.load_profile("nexalc")
