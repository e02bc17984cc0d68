import pytest

from bubblewalk.core.exception import ValidationException
from bubblewalk.dependencies import (
    experiment_config,
    parse_alpha,
    parse_start,
    read_config_file,
    resolve_options,
)
from bubblewalk.models.scaling import RuleKind
from bubblewalk.models.vertex import ROOT, VertexAddress, parse_word
from bubblewalk.schemas.experiment import OutputFormat


@pytest.mark.unit
class TestParseAlpha:
    """Unit tests for --alpha specs."""

    def test_forms(self):
        """Every documented form resolves."""
        assert parse_alpha("canonical").kind is RuleKind.CANONICAL
        assert parse_alpha("geometric:1.5").ratio == 1.5
        assert parse_alpha("constant:3").constant == 3
        assert parse_alpha("explicit:2,3,4").values == (2, 3, 4)

    def test_file(self, tmp_path):
        """One value per line, comments allowed."""
        path = tmp_path / "fig1.txt"
        path.write_text("# small rule\n2\n3\n\n4\n")
        assert parse_alpha(f"file:{path}").values == (2, 3, 4)

    @pytest.mark.parametrize("spec", ["", "bogus", "geometric:x", "constant:", "canonical:2", "explicit:1,x"])
    def test_malformed(self, spec):
        """Malformed specs fail validation."""
        with pytest.raises(ValidationException):
            parse_alpha(spec)

    def test_missing_file(self, tmp_path):
        """Unreadable files fail validation."""
        with pytest.raises(ValidationException):
            parse_alpha(f"file:{tmp_path / 'absent.txt'}")


@pytest.mark.unit
class TestParseStart:
    """Unit tests for wreath start specs."""

    def test_full(self):
        """Lamps and base are both read."""
        e = parse_start("lamps=:0,1:2;base=aB")
        assert e.lamps == frozenset({ROOT, VertexAddress(2, 1, 2)})
        assert e.base == parse_word("aB")

    def test_identity(self):
        """Empty fields give the identity."""
        e = parse_start("lamps=;base=")
        assert not e.lamps and e.base == ()

    def test_malformed(self):
        """Unknown keys are rejected."""
        with pytest.raises(ValidationException):
            parse_start("lights=:0")


@pytest.mark.unit
class TestConfigFile:
    """Unit tests for key=value config files."""

    def test_read(self, tmp_path):
        """Comments and blank lines are skipped; dashes become underscores."""
        path = tmp_path / "run.cfg"
        path.write_text("# run\nalpha = explicit:2,3,4\nk-max=2\n\nseed=7  # fixed\n")
        assert read_config_file(path) == {"alpha": "explicit:2,3,4", "k_max": "2", "seed": "7"}

    def test_no_file(self):
        """No path, no values."""
        assert read_config_file(None) == {}

    def test_bad_line(self, tmp_path):
        """A line without '=' is an error."""
        path = tmp_path / "run.cfg"
        path.write_text("alpha\n")
        with pytest.raises(ValidationException):
            read_config_file(path)

    def test_flags_override_file(self, tmp_path):
        """Given flags win over the file; absent flags do not erase it."""
        path = tmp_path / "run.cfg"
        path.write_text("seed=7\nn=10\n")
        values = resolve_options(path, seed=9, n=None, out=None)
        assert values == {"seed": 9, "n": "10"}

    def test_experiment_config(self):
        """Shared options are validated; the seed has a default."""
        config = experiment_config({"alpha": "constant:2", "format": "json", "n": 5})
        assert config.alpha == "constant:2"
        assert config.format is OutputFormat.JSON
        assert config.seed >= 0
