import json

import pytest
from pydantic import BaseModel

from bubblewalk.core.exception import OutputException
from bubblewalk.schemas.experiment import OutputFormat
from bubblewalk.schemas.orbit import Sampler
from bubblewalk.utils.output import format_value, write_rows


class _Row(BaseModel):
    name: str
    value: float
    flag: bool
    extra: int | None = None


@pytest.mark.unit
class TestOutput:
    """Unit tests for CSV and JSON emission."""

    @pytest.mark.parametrize(
        "value,text",
        [(None, ""), (True, "true"), (False, "false"), (0.1, "0.1"), (3, "3"), (Sampler.BRIDGE, "bridge")],
    )
    def test_format_value(self, value, text):
        """Cells are locale-free and round-trip floats."""
        assert format_value(value) == text

    def test_csv(self, tmp_path):
        """Header row of field names, one line per row."""
        path = tmp_path / "rows.csv"
        write_rows([_Row(name="a", value=0.5, flag=True), _Row(name="b", value=2.0, flag=False, extra=3)], path)
        assert path.read_text() == "name,value,flag,extra\na,0.5,true,\nb,2.0,false,3\n"

    def test_json_lines(self, tmp_path):
        """One JSON object per row."""
        path = tmp_path / "rows.json"
        write_rows([_Row(name="a", value=0.5, flag=True)], path, OutputFormat.JSON)
        lines = path.read_text().splitlines()
        assert [json.loads(line) for line in lines] == [{"name": "a", "value": 0.5, "flag": True, "extra": None}]

    def test_unwritable(self, tmp_path):
        """A missing directory raises an output error."""
        with pytest.raises(OutputException) as exc_info:
            write_rows([_Row(name="a", value=1.0, flag=True)], tmp_path / "missing" / "rows.csv")

        assert exc_info.value.exit_code == 6
