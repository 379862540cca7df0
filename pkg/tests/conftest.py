import pytest

from kgraphkms import Skeleton, normalize_dynamics


def skeleton(labels, *matrices) -> Skeleton:
    return Skeleton(tuple(labels), tuple(tuple(tuple(row) for row in m) for m in matrices))


# Three single-vertex components u <- v, u <- w with loops; w is the
# dominant hereditary end for the preferred dynamics (ln 5, ln 4).
EXAMPLE_1 = skeleton(
    "uvw",
    [[2, 2, 3], [0, 4, 0], [0, 0, 5]],
    [[2, 1, 2], [0, 3, 0], [0, 0, 4]],
)

# Two incomparable hereditary ends: v is critical in colour 2, w in colour 1,
# preferred dynamics (ln 11, ln 13).
EXAMPLE_2 = skeleton(
    "uvw",
    [[5, 1, 1], [0, 10, 0], [0, 0, 11]],
    [[3, 2, 1], [0, 13, 0], [0, 0, 9]],
)

# Commuting but with no bridge from w into v in either colour; the ordering
# conclusion fails in colour 2 (4 > 3), so the hypothesis must catch it.
NO_BRIDGE_COUNTEREXAMPLE = skeleton(
    "uvw",
    [[1, 2, 2], [0, 3, 0], [0, 0, 5]],
    [[1, 3, 1], [0, 4, 0], [0, 0, 3]],
)


@pytest.fixture
def ex1():
    return EXAMPLE_1


@pytest.fixture
def ex1_dyn():
    return normalize_dynamics(EXAMPLE_1)


@pytest.fixture
def ex2():
    return EXAMPLE_2


@pytest.fixture
def ex2_dyn():
    return normalize_dynamics(EXAMPLE_2)


def state_set(states, digits=9):
    """Order-insensitive comparable form of a state list."""
    return sorted(tuple(round(x, digits) for x in s.m) for s in states)
