from __future__ import annotations

from enum import Enum


class Group(str, Enum):
    U = "U"
    SU = "SU"
    SO = "SO"
    SP = "SP"

    @classmethod
    def parse(cls, value: str) -> "Group":
        try:
            return cls(value.strip().upper())
        except ValueError:
            raise ValueError(f"unknown group {value!r}; expected one of u, su, so, sp") from None


class Flavor(str, Enum):
    ORTHOGONAL = "ORTHOGONAL"
    SYMPLECTIC = "SYMPLECTIC"


class OutputFormat(str, Enum):
    JSON = "JSON"
    CSV = "CSV"
