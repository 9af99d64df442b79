import numpy as np
import pytest
from hypothesis import strategies as st

from jssp_mcts.instance import Instance, parse_instance

# J1: M1 for 3 then M2 for 2; J2: M2 for 2 then M1 for 4
INSTANCE_A_TEXT = "2 2\n3 2\n2 4\n1 2\n2 1"


@pytest.fixture
def inst_a() -> Instance:
    return parse_instance(INSTANCE_A_TEXT)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@st.composite
def instances(draw, max_jobs=5, max_machines=5, max_time=50):
    n = draw(st.integers(1, max_jobs))
    m = draw(st.integers(1, max_machines))
    proc = [draw(st.lists(st.integers(1, max_time), min_size=m, max_size=m)) for _ in range(n)]
    route = [draw(st.permutations(range(m))) for _ in range(n)]
    return Instance(proc, route)


@st.composite
def tiny_instances(draw, max_sequences=3000):
    """Instances small enough for brute-force enumeration."""
    from jssp_mcts.exact import interleaving_count

    inst = draw(instances(max_jobs=4, max_machines=4, max_time=20))
    from hypothesis import assume

    assume(inst.n_ops <= 12 and interleaving_count(inst) <= max_sequences)
    return inst


# acceptance criteria report one line each at the end of the session
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[0][1:])):
            terminalreporter.write_line(line)
