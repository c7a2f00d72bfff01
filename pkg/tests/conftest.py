import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from thetaquartic import AronholdSystem, PeriodMatrix, QuadForm, random_admissible_tau

#: the alternative Aronhold system whose seven forms sum to the origin form
ORIGIN_SUM_SYSTEM = AronholdSystem((
    QuadForm.from_bits((1, 1, 1), (1, 1, 1)),
    QuadForm.from_bits((1, 1, 0), (1, 0, 0)),
    QuadForm.from_bits((1, 0, 1), (0, 0, 1)),
    QuadForm.from_bits((1, 0, 0), (1, 1, 0)),
    QuadForm.from_bits((0, 1, 0), (0, 1, 1)),
    QuadForm.from_bits((0, 0, 1), (1, 0, 1)),
    QuadForm.from_bits((0, 1, 1), (0, 1, 0)),
))


@pytest.fixture(scope="session")
def tau_seed1() -> PeriodMatrix:
    return random_admissible_tau(1)


@pytest.fixture(scope="session")
def tau_seed2() -> PeriodMatrix:
    return random_admissible_tau(2)


@pytest.fixture(scope="session")
def tau_identity() -> PeriodMatrix:
    return PeriodMatrix(1j * np.eye(3))
