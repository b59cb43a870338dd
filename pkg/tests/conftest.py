import numpy as np
import pytest

from spinctl import ChainSpec, basis_state

ACCEPTANCE_LINES: list[str] = []


def record(number: int, title: str, passed: bool, detail: str = "", flag: bool = False) -> None:
    status = "FLAG" if flag else ("PASS" if passed else "FAIL")
    ACCEPTANCE_LINES.append(f"[{status}] criterion {number:2d}: {title} -- {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def xxz_chain():
    return ChainSpec(3, 1.0, 1.0, 0.2)


@pytest.fixture
def transfer_states():
    return basis_state(3, "100"), basis_state(3, "001")


def random_state(rng, n):
    psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return psi / np.linalg.norm(psi)


def random_density(rng, n, rank=None):
    dim = 1 << n
    A = rng.normal(size=(dim, rank or dim)) + 1j * rng.normal(size=(dim, rank or dim))
    rho = A @ A.conj().T
    return rho / np.trace(rho)
