import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from symwave.design import bank_from_masks  # noqa: E402
from symwave.fileio import golden  # noqa: E402
from symwave.lattice import build_context, fourfold_group, pair_digits, validate_group  # noqa: E402
from symwave.laurent import LaurentPoly  # noqa: E402

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

M1 = ((1, -2), (2, -1))
M2 = ((2, 0), (0, 2))
M3 = ((1, 1), (1, -1))
HALF = Fraction(1, 2)


def ex1_bank_build():
    ctx, _ = pair_digits(build_context(M1, None, "minimal"), (0, 0))
    return bank_from_masks(golden("ex1_m0"), LaurentPoly.const(1, 2), ctx, "point-a", (0, 0))


def ex2_bank_build():
    ctx = build_context(M2)
    return bank_from_masks(golden("ex2_m0"), golden("ex2_dual_m0"), ctx, "axial", (HALF, HALF))


def ex3_bank_build():
    ctx = build_context(M3)
    G = validate_group(ctx, fourfold_group())
    return bank_from_masks(golden("ex3_m0"), LaurentPoly.const(1, 2), ctx, "group", (0, 0), G)


HAT = LaurentPoly({(-1,): Fraction(1, 4), (0,): Fraction(1, 2), (1,): Fraction(1, 4)})


def hat_bank_build():
    ctx, _ = pair_digits(build_context([[2]]), (0,))
    return bank_from_masks(HAT, LaurentPoly.const(1, 1), ctx, "point-a", (0,))


@pytest.fixture(scope="session")
def ex1_bank():
    return ex1_bank_build()


@pytest.fixture(scope="session")
def ex2_bank():
    return ex2_bank_build()


@pytest.fixture(scope="session")
def ex3_bank():
    return ex3_bank_build()


@pytest.fixture(scope="session")
def hat_bank():
    return hat_bank_build()


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
