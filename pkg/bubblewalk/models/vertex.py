import enum
import re
from typing import Iterable, NamedTuple, Tuple

import numpy as np

from ..core.exception import ValidationException


class Letter(str, enum.Enum):
    """Generators of the bubble group and their inverses (A = a^-1, B = b^-1)."""

    A = "a"
    A_INV = "A"
    B = "b"
    B_INV = "B"

    @property
    def code(self) -> int:
        return _CODES[self]

    @property
    def inverse(self) -> "Letter":
        return _LETTERS[_CODES[self] ^ 1]

    @property
    def step(self) -> int:
        """Projection to the lazy walk on Z."""
        return _STEPS[_CODES[self]]

    @classmethod
    def from_code(cls, code: int) -> "Letter":
        return _LETTERS[code]


# Numeric codes used by the array kernels; inverse(code) == code ^ 1.
_LETTERS = (Letter.A, Letter.A_INV, Letter.B, Letter.B_INV)
_CODES = {letter: i for i, letter in enumerate(_LETTERS)}
_STEPS = (1, -1, 0, 0)
STEP_OF_CODE = np.array(_STEPS, dtype=np.int64)
ALIASES = {"a": "a", "A": "A", "b": "b", "B": "B", "a_inv": "A", "b_inv": "B", "a^-1": "A", "b^-1": "B"}

Word = Tuple[Letter, ...]


def parse_word(text: str) -> Word:
    """
    Parse a word such as "abAB", "a b b_inv a" or "" (identity).

    Raises:
        ValidationException: If a token is not a generator letter
    """
    text = text.strip()
    if text in ("", "e", "1"):
        return ()
    tokens = text.split() if (" " in text or "_" in text or "^" in text) else list(text)
    letters = []
    for token in tokens:
        if token not in ALIASES:
            raise ValidationException(f"unknown letter '{token}'", field="word")
        letters.append(Letter(ALIASES[token]))
    return tuple(letters)


def format_word(word: Iterable[Letter]) -> str:
    return "".join(letter.value for letter in word)


def invert_word(word: Word) -> Word:
    return tuple(letter.inverse for letter in reversed(word))


def word_codes(word: Word) -> np.ndarray:
    return np.fromiter((letter.code for letter in word), dtype=np.int64, count=len(word))


def word_from_codes(codes: Iterable[int]) -> Word:
    return tuple(_LETTERS[int(c)] for c in codes)


_ADDRESS_RE = re.compile(r"^([01]*):(\d+)$")


class VertexAddress(NamedTuple):
    """
    Canonical vertex of S(alpha): level, branch path and cycle position.

    The path holds level - 1 branch bits, the first choice in the most
    significant bit. Range checks against a rule live in GraphService.
    """

    level: int
    path: int
    pos: int

    @classmethod
    def parse(cls, text: str) -> "VertexAddress":
        match = _ADDRESS_RE.match(text.strip())
        if not match:
            raise ValidationException(f"expected 'path:pos', got '{text}'", field="address")
        bits, pos = match.groups()
        return cls(level=len(bits) + 1, path=int(bits, 2) if bits else 0, pos=int(pos))

    @property
    def path_bits(self) -> str:
        if self.level == 1:
            return ""
        return format(self.path, f"0{self.level - 1}b")

    def __str__(self) -> str:
        return f"{self.path_bits}:{self.pos}"


ROOT = VertexAddress(1, 0, 0)


class VertexBatch(NamedTuple):
    """Structure-of-arrays form of many vertices for the numpy kernels."""

    level: np.ndarray
    path: np.ndarray
    pos: np.ndarray

    @classmethod
    def from_addresses(cls, addresses: Iterable[VertexAddress]) -> "VertexBatch":
        rows = list(addresses)
        if not rows:
            return cls.empty()
        arr = np.asarray(rows, dtype=np.int64).reshape(len(rows), 3)
        return cls(arr[:, 0].copy(), arr[:, 1].copy(), arr[:, 2].copy())

    @classmethod
    def empty(cls) -> "VertexBatch":
        z = np.zeros(0, dtype=np.int64)
        return cls(z, z.copy(), z.copy())

    @classmethod
    def repeat(cls, vertex: VertexAddress, size: int) -> "VertexBatch":
        return cls(
            np.full(size, vertex.level, dtype=np.int64),
            np.full(size, vertex.path, dtype=np.int64),
            np.full(size, vertex.pos, dtype=np.int64),
        )

    @property
    def size(self) -> int:
        return int(self.level.shape[0])

    def take(self, index) -> "VertexBatch":
        return VertexBatch(self.level[index], self.path[index], self.pos[index])

    def concat(self, other: "VertexBatch") -> "VertexBatch":
        return VertexBatch(
            np.concatenate([self.level, other.level]),
            np.concatenate([self.path, other.path]),
            np.concatenate([self.pos, other.pos]),
        )

    def is_root(self) -> np.ndarray:
        return (self.level == 1) & (self.pos == 0)

    def to_addresses(self) -> list[VertexAddress]:
        return [
            VertexAddress(int(l), int(p), int(q))
            for l, p, q in zip(self.level.tolist(), self.path.tolist(), self.pos.tolist())
        ]

    def fingerprint(self) -> bytes:
        return np.stack([self.level, self.path, self.pos]).tobytes()
