from typing import FrozenSet

from pydantic import BaseModel, ConfigDict, Field

from .vertex import Letter, VertexAddress, Word, format_word


class WreathElement(BaseModel):
    """Element (f, g) of Z2 wr_S Gamma: lit lamps plus a base word for g."""

    lamps: FrozenSet[VertexAddress] = Field(default_factory=frozenset)
    base: Word = ()

    model_config = ConfigDict(frozen=True)

    @classmethod
    def identity(cls) -> "WreathElement":
        return cls()

    @classmethod
    def generator(cls, letter: Letter) -> "WreathElement":
        return cls(base=(letter,))

    def describe(self) -> str:
        lamps = ",".join(sorted(str(x) for x in self.lamps))
        return f"lamps={lamps};base={format_word(self.base)}"
