"""Verdict vocabulary shared by the classifier and the numerical oracle."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field


class Status(str, enum.Enum):
    OUTSIDE_SPECTRUM = "OutsideSpectrum"
    RIGHT_INVERTIBLE = "RightInvertible"
    LEFT_INVERTIBLE = "LeftInvertible"
    NOT_ONE_SIDED = "NotOneSided"
    ON_CIRCLE = "OnCircle"


class Kernel(str, enum.Enum):
    ZERO = "Zero"
    INFINITE_DIM = "InfiniteDim"
    UNKNOWN = "Unknown"


class Range(str, enum.Enum):
    CLOSED = "Closed"
    DENSE_NOT_CLOSED = "DenseNotClosed"
    CLOSED_NOT_DENSE = "ClosedNotDense"
    NOT_CLOSED = "NotClosed"
    UNKNOWN = "Unknown"


class Provenance(str, enum.Enum):
    MAIN_THEOREM = "MainTheorem"
    SIMPLEX_THEOREM = "SimplexTheorem"
    BOTH = "Both"


# Integer codes for region maps (scan --phases).
STATUS_CODES = {
    Status.OUTSIDE_SPECTRUM: 0,
    Status.RIGHT_INVERTIBLE: 1,
    Status.LEFT_INVERTIBLE: 2,
    Status.NOT_ONE_SIDED: 3,
    Status.ON_CIRCLE: 4,
}


@dataclass(frozen=True)
class Annulus:
    r: float
    R: float

    def contains(self, modulus: float) -> bool:
        return self.r <= modulus <= self.R

    def to_dict(self) -> dict:
        return {"r": self.r, "R": self.R}


@dataclass(frozen=True)
class Classification:
    """Spectral verdict for ``B - lambda I``."""

    lam: complex
    status: Status
    kernel: Kernel
    range: Range
    provenance: Provenance
    circle_hits: tuple[int, ...] = field(default=())

    @property
    def modulus(self) -> float:
        return abs(self.lam)

    def same_verdict(self, other: "Classification") -> bool:
        return (self.status, self.kernel, self.range, self.circle_hits) == (
            other.status, other.kernel, other.range, other.circle_hits)

    def to_dict(self) -> dict:
        lam = complex(self.lam)
        return {
            "lambda": {"re": lam.real, "im": lam.imag},
            "modulus": abs(lam),
            "status": self.status.value,
            "kernel": self.kernel.value,
            "range": self.range.value,
            "provenance": self.provenance.value,
            "circle_hits": list(self.circle_hits),
        }
