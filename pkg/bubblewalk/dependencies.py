import logging
from pathlib import Path
from typing import Any, Dict, Optional

from .config import settings
from .core.exception import ValidationException
from .models.scaling import ScalingRule
from .models.vertex import VertexAddress, parse_word
from .models.wreath import WreathElement
from .schemas.experiment import ExperimentConfig

logger = logging.getLogger(__name__)


def parse_alpha(spec: str) -> ScalingRule:
    """
    Resolve an --alpha value into a ScalingRule.

    Accepted forms: canonical, geometric:<r>, constant:<c>, explicit:<a,b,...>
    and file:<path> (one integer per line, level 1 first).

    Raises:
        ValidationException: If the spec is malformed or the file unreadable
    """
    kind, _, arg = spec.strip().partition(":")
    try:
        if kind == "canonical" and not arg:
            return ScalingRule.canonical()
        if kind == "geometric":
            return ScalingRule.geometric(float(arg))
        if kind == "constant":
            return ScalingRule.constant_rule(int(arg))
        if kind == "explicit":
            return ScalingRule.explicit(*(int(v) for v in arg.split(",") if v.strip()))
        if kind == "file":
            return _read_alpha_file(Path(arg))
    except ValueError as ex:
        raise ValidationException(f"invalid alpha spec '{spec}': {ex}", field="alpha")
    raise ValidationException(
        f"invalid alpha spec '{spec}' (expected canonical, geometric:<r>, constant:<c>, "
        "explicit:<a,b,...> or file:<path>)",
        field="alpha",
    )


def _read_alpha_file(path: Path) -> ScalingRule:
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as ex:
        raise ValidationException(f"cannot read alpha file '{path}': {ex.strerror}", field="alpha")
    values = [int(line) for line in (raw.split("#")[0].strip() for raw in lines) if line]
    return ScalingRule.explicit(*values)


def parse_start(spec: str) -> WreathElement:
    """Parse 'lamps=<addr,addr,...>;base=<word>' into a wreath element."""
    fields: Dict[str, str] = {}
    for part in spec.split(";"):
        if not part.strip():
            continue
        key, sep, value = part.partition("=")
        if not sep or key.strip() not in ("lamps", "base"):
            raise ValidationException(f"invalid start spec '{spec}'", field="start")
        fields[key.strip()] = value.strip()
    lamps = frozenset(VertexAddress.parse(a) for a in fields.get("lamps", "").split(",") if a.strip())
    return WreathElement(lamps=lamps, base=parse_word(fields.get("base", "")))


def read_config_file(path: Optional[Path]) -> Dict[str, str]:
    """key=value lines; '#' starts a comment; keys use the long flag name."""
    if path is None:
        return {}
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as ex:
        raise ValidationException(f"cannot read config file '{path}': {ex.strerror}", field="config")
    values = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#")[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValidationException(f"{path}:{number}: expected key=value", field="config")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def resolve_options(config: Optional[Path], **flags: Any) -> Dict[str, Any]:
    """Merge a config file with command-line flags; flags that were given win."""
    values: Dict[str, Any] = read_config_file(config)
    values.update({key: value for key, value in flags.items() if value is not None})
    logger.debug("Resolved options: %s", values)
    return values


def experiment_config(values: Dict[str, Any]) -> ExperimentConfig:
    shared = {key: values[key] for key in ExperimentConfig.model_fields if key in values}
    shared.setdefault("seed", settings.DEFAULT_SEED)
    return ExperimentConfig.model_validate(shared)
