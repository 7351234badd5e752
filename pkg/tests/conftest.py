import pytest

from celllayout import CellLayoutInstance, load_fixture


@pytest.fixture(scope="session")
def table1():
    return load_fixture("table1_6x6")


@pytest.fixture
def two_cell():
    """Worked example: one directed flow, U closeness, locations 3 apart."""
    return CellLayoutInstance(
        flow=[[0, 4], [0, 0]],
        closeness=[[0, 2], [2, 0]],
        distance=[[0, 3], [3, 0]],
        w=0.5,
        name="two_cell",
    )


@pytest.fixture
def write_instance(tmp_path):
    def _write(text, name="inst.txt"):
        path = tmp_path / name
        path.write_text(text)
        return path

    return _write


VALID_TEXT = """\
N 3
W 0.5
FLOW
0 4 0
1 0 2
0 0 0
CLOSENESS LETTERS
- E U
- - A
- - -
DISTANCE
0 1 2
1 0 1
2 1 0
"""


@pytest.fixture
def valid_text():
    return VALID_TEXT
