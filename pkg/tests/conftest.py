import functools

import pytest

from hlrc.code import CodeSpec, generator_matrix, validate_spec
from hlrc.recovery import build_hierarchy
from hlrc.surface import as_example_surface, hermitian_cone_surface, kummer_example_surface

ACCEPTANCE_LINES: list[str] = []


@functools.lru_cache(maxsize=None)
def built(kind: str, rho: tuple[int, int, int], eta=None):
    """(code, generator matrix, hierarchy) for a named example surface, cached across tests."""
    surface = {
        "as3": lambda: as_example_surface(3),
        "as5": lambda: as_example_surface(5),
        "kummer2": lambda: kummer_example_surface(2),
        "kummer5": lambda: kummer_example_surface(5),
        "herm2": lambda: hermitian_cone_surface(2),
    }[kind]()
    code = validate_spec(CodeSpec(surface, eta, *rho))
    G = generator_matrix(code)
    return code, G, build_hierarchy(code.evalset)


@pytest.fixture(scope="session")
def as421():
    return built("as3", (4, 2, 1), 5)


@pytest.fixture(scope="session")
def kummer621():
    return built("kummer5", (6, 2, 1))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
