from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import settings

from tatebound.curve import WeierstrassModel

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

# The three printed example curves, with their Mordell-Weil generators and prime p.
CORPUS = {
    "10082": ([1, 0, 1, -141, 624], [(-6, 38), (6, -1)], 2),
    "15650": ([1, 1, 1, -55238, 4974531], [(Fraction(37305, 64), Fraction(-6849551, 512)), (-75, 2987)], 2),
    "13467": ([1, 0, 0, 543, 10026], [(-13, 35), (39, 282)], 3),
}

# Split multiplicative at 7 and 13 with rank 1; used as auxiliary primes.
AUX_91 = ([0, 1, 1, -7, 5], [(-1, 3)])

ACCEPTANCE_LINES: list[str] = []


def model(coeffs) -> WeierstrassModel:
    return WeierstrassModel.from_list(coeffs)


def gens(points):
    return tuple((Fraction(x), Fraction(y)) for x, y in points)


@pytest.fixture(scope="session")
def corpus_models():
    return {k: (model(c), gens(g), p) for k, (c, g, p) in CORPUS.items()}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
