"""CEFR proficiency labels and their coarse/ordinal/binary projections."""

from __future__ import annotations

import enum


class CefrLabel(enum.Enum):
    """One of the six CEFR levels A1..C2.

    The three views used by the experiments:
      * full six-level value (``level``),
      * coarse letter A/B/C (``coarse``), ordinal 1/2/3 (``ordinal``),
      * binary Simple (A or B) vs Complex (C).
    """

    A1 = "A1"
    A2 = "A2"
    B1 = "B1"
    B2 = "B2"
    C1 = "C1"
    C2 = "C2"

    @property
    def level(self) -> str:
        return self.value

    def coarse(self) -> str:
        return self.value[0]

    def ordinal(self) -> int:
        return _COARSE_ORDINAL[self.coarse()]

    def binary(self) -> str:
        return SIMPLE if self.coarse() in ("A", "B") else COMPLEX

    @classmethod
    def parse(cls, text: str) -> "CefrLabel":
        """Parse a level string; raises ValueError on anything but A1..C2."""
        try:
            return cls(text.strip().upper())
        except ValueError:
            raise ValueError(f"not a CEFR level: {text!r}") from None

    def __str__(self) -> str:
        return self.value


_COARSE_ORDINAL = {"A": 1, "B": 2, "C": 3}

SIMPLE = "Simple"
COMPLEX = "Complex"

COARSE_LEVELS = ("A", "B", "C")
BINARY_LEVELS = (SIMPLE, COMPLEX)


def coarse_ordinal(coarse: str) -> int:
    """Ordinal of a coarse letter: A -> 1, B -> 2, C -> 3."""
    return _COARSE_ORDINAL[coarse]
