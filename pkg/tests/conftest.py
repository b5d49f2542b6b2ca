import random

import pytest

from sramhash.keccak_ref import KeccakState

# criterion name -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def rng():
    return random.Random(0x5A3)


def random_states(seed: int, count: int, w: int = 64) -> list[KeccakState]:
    r = random.Random(seed)
    return [KeccakState.random(r, w) for _ in range(count)]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in ACCEPTANCE_RESULTS.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
