from .scaling import RuleKind, ScalingRule, MAX_LEVEL
from .vertex import Letter, Word, VertexAddress, VertexBatch, ROOT
from .wreath import WreathElement

__all__ = [
    "RuleKind",
    "ScalingRule",
    "MAX_LEVEL",
    "Letter",
    "Word",
    "VertexAddress",
    "VertexBatch",
    "ROOT",
    "WreathElement",
]
