import pytest

from bubblewalk.main import app


@pytest.fixture
def fig1_file(tmp_path):
    """alpha = (2, 3, 4) as an alpha file."""
    path = tmp_path / "fig1.txt"
    path.write_text("2\n3\n4\n")
    return path


@pytest.fixture
def invoke(cli_runner):
    """Run the CLI with the given arguments."""

    def _invoke(*args: str):
        return cli_runner.invoke(app, [str(a) for a in args])

    return _invoke
