import random

import pytest
from hypothesis import settings

from sppf.circuit import Circuit, Gate

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

# filled by test_acceptance.report(); printed once at the end of the session
ACCEPTANCE_LINES: list[str] = []

SINGLE_KINDS = ("V", "Vdg", "S", "Sdg")


def random_clifford_circuit(rng: random.Random, n: int, n_gates: int) -> Circuit:
    gates = []
    for _ in range(n_gates):
        if n > 1 and rng.random() < 0.35:
            a, b = rng.sample(range(n), 2)
            gates.append(Gate("CNOT", (a, b)))
        else:
            gates.append(Gate(rng.choice(SINGLE_KINDS), (rng.randrange(n),)))
    return Circuit(n, gates)


def random_strings(rng: random.Random, n: int, count: int) -> list[str]:
    out = []
    for _ in range(count):
        k = rng.randint(1, n)
        s = ["I"] * n
        for p in rng.sample(range(n), k):
            s[p] = rng.choice("XYZ")
        out.append("".join(s))
    return out


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
