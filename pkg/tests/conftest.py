import pytest

from helpers import ACCEPTANCE_REPORT, grid_from_rows


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_REPORT:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_REPORT):
            terminalreporter.write_line(line)


@pytest.fixture
def open3():
    return grid_from_rows("...", "...", "...")


@pytest.fixture
def open_block_map():
    # the agent in the middle of a vacant 3x3 block
    return grid_from_rows("...", "...", "...")


@pytest.fixture
def walled_pocket_map():
    # walled 3x3 pocket; the goal side is cut off by the wall column
    return grid_from_rows(
        "@@@@@@@",
        "@...@..",
        "@...@..",
        "@...@..",
    )
