"""Corpus enumeration: basis specs, cardinalities and the index bijection.

A basis spec fixes the monomial shapes x^h*y^k with 1 <= h+k <= max_degree
(optionally extended by sin/cos of each variable) and a coefficient set
delta.  Every nonzero choice of one coefficient per shape is a corpus
member; the mixed-radix bijection gives O(1) random access by index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .expr import HamFunction, Monomial, TermShape, Trig

__all__ = [
    "BasisSpec",
    "BUILTIN_DELTAS",
    "cardinality",
    "function_at",
    "index_of",
    "enumerate_range",
]

BUILTIN_DELTAS: dict[str, tuple[Fraction, ...]] = {
    "d3": tuple(Fraction(n) for n in (-1, 0, 1)),
    "d5": tuple(Fraction(n, 2) for n in (-2, -1, 0, 1, 2)),
    "d7": tuple(Fraction(n, 3) for n in (-3, -2, -1, 0, 1, 2, 3)),
    "d9": tuple(Fraction(n, 4) for n in (-4, -3, -2, -1, 0, 1, 2, 3, 4)),
}

_TRIG_SHAPES = (Trig("sin", "x"), Trig("sin", "y"), Trig("cos", "x"), Trig("cos", "y"))


@dataclass(frozen=True)
class BasisSpec:
    max_degree: int
    trig: bool = False
    delta: tuple[Fraction, ...] = BUILTIN_DELTAS["d3"]
    _shapes: tuple[TermShape, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.max_degree < 1:
            raise ValueError("max_degree must be >= 1")
        delta = tuple(sorted(Fraction(d) for d in self.delta))
        if len(set(delta)) != len(delta):
            raise ValueError("delta values must be pairwise distinct")
        if Fraction(0) not in delta:
            raise ValueError("delta must contain 0")
        object.__setattr__(self, "delta", delta)
        monos = [Monomial(h, k)
                 for d in range(1, self.max_degree + 1)
                 for h in range(d, -1, -1)
                 for k in (d - h,)]
        monos.sort(key=lambda s: s.order_key())
        shapes = tuple(monos) + (_TRIG_SHAPES if self.trig else ())
        object.__setattr__(self, "_shapes", shapes)

    @property
    def shapes(self) -> tuple[TermShape, ...]:
        """All basis shapes in canonical order."""
        return self._shapes

    @property
    def n_shapes(self) -> int:
        return len(self._shapes)

    @property
    def digit_coeffs(self) -> tuple[Fraction, ...]:
        """Digit alphabet for the bijection: 0 first, then nonzero ascending.

        Placing 0 at digit 0 makes the all-zero numeral the unique zero
        function, so excluding numeral 0 excludes exactly the constant.
        """
        return (Fraction(0),) + tuple(d for d in self.delta if d != 0)

    def describe(self) -> dict:
        return {
            "max_degree": self.max_degree,
            "trig": self.trig,
            "delta": [f"{d.numerator}/{d.denominator}" for d in self.delta],
        }

    @classmethod
    def from_names(cls, basis: str, delta: str, trig: bool = False) -> "BasisSpec":
        """Build from CLI names like basis='b2', delta='d5'."""
        if not (basis.startswith("b") and basis[1:].isdigit()
                and 1 <= int(basis[1:]) <= 5):
            raise ValueError(f"unknown basis name {basis!r} (expected b1..b5)")
        if delta not in BUILTIN_DELTAS:
            raise ValueError(f"unknown delta name {delta!r} (expected d3|d5|d7|d9)")
        return cls(int(basis[1:]), trig, BUILTIN_DELTAS[delta])


def cardinality(spec: BasisSpec) -> int:
    """Number of corpus members: l^S - 1 (the zero function is excluded)."""
    return len(spec.delta) ** spec.n_shapes - 1


def function_at(index: int, spec: BasisSpec) -> HamFunction:
    """Mixed-radix bijection from index to corpus member.

    index+1 is read as a base-l numeral over the canonically ordered shapes,
    least-significant digit first; digit d selects digit_coeffs[d].
    """
    size = cardinality(spec)
    if not 0 <= index < size:
        raise IndexError(f"index {index} out of range [0, {size})")
    base = len(spec.delta)
    coeffs = spec.digit_coeffs
    numeral = index + 1
    terms = []
    for shape in spec.shapes:
        numeral, digit = divmod(numeral, base)
        if digit:
            terms.append((coeffs[digit], shape))
    return HamFunction.from_terms(terms)


def index_of(f: HamFunction, spec: BasisSpec) -> int:
    """Inverse of :func:`function_at`; rejects foreign shapes/coefficients."""
    digit_of = {c: d for d, c in enumerate(spec.digit_coeffs)}
    by_shape = dict((s, c) for c, s in f.terms)
    for shape, coeff in by_shape.items():
        if shape not in spec.shapes:
            raise ValueError(f"shape {shape} not in basis")
        if coeff not in digit_of:
            raise ValueError(f"coefficient {coeff} not in delta")
    base = len(spec.delta)
    numeral = 0
    for shape in reversed(spec.shapes):
        numeral = numeral * base + digit_of[by_shape.get(shape, Fraction(0))]
    return numeral - 1


def enumerate_range(spec: BasisSpec, lo: int, hi: int) -> Iterator[HamFunction]:
    """Stream function_at(j) for j in [lo, hi); O(1) memory."""
    size = cardinality(spec)
    if not (0 <= lo <= hi <= size):
        raise IndexError(f"range [{lo}, {hi}) out of bounds for size {size}")
    for j in range(lo, hi):
        yield function_at(j, spec)
