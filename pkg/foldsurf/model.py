"""
Module holding the value types shared by all parts of the library: qubit
coordinates, Pauli operators and mid-cycle timestamps.

Coordinates are doubled so that the half-integer positions of ancilla qubits
stay integral: a data qubit at (x, y) is stored as (2x, 2y) and an ancilla at
(x + 1/2, y + 1/2) as (2x + 1, 2y + 1). The y axis grows downward.
"""

import enum
from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, Mapping, NamedTuple, Optional, Tuple


class Coord(NamedTuple):
    x2: int
    y2: int

    @classmethod
    def from_half(cls, x: float, y: float) -> "Coord":
        """
        Build a coordinate from (possibly half-integer) undoubled values.
        """

        x2, y2 = 2 * x, 2 * y
        if x2 != int(x2) or y2 != int(y2):
            raise ValueError(f"({x}, {y}) is not on the half-integer grid")

        return cls(int(x2), int(y2))

    @property
    def half(self) -> Tuple[float, float]:
        return self.x2 / 2, self.y2 / 2

    @property
    def is_data(self) -> bool:
        return self.x2 % 2 == 0 and self.y2 % 2 == 0

    @property
    def is_ancilla(self) -> bool:
        return self.x2 % 2 == 1 and self.y2 % 2 == 1

    def shifted(self, dx2: int, dy2: int) -> "Coord":
        return Coord(self.x2 + dx2, self.y2 + dy2)

    def mirrored(self) -> "Coord":
        """
        Reflect about the main diagonal (x = y).
        """

        return Coord(self.y2, self.x2)

    def __str__(self) -> str:
        return f"{self.x2},{self.y2}"


class Pauli(enum.IntEnum):
    """
    Single-qubit Pauli operators in binary symplectic encoding: bit 0 is the
    X component and bit 1 the Z component, so that `a ^ b` is the product
    modulo phase.
    """

    I = 0
    X = 1
    Z = 2
    Y = 3

    @property
    def has_x(self) -> bool:
        return bool(self & 1)

    @property
    def has_z(self) -> bool:
        return bool(self & 2)

    def anticommutes(self, other: "Pauli") -> bool:
        return self != Pauli.I and other != Pauli.I and self != other

    def __str__(self) -> str:
        return self.name


def _phase_exponent(a: int, b: int) -> int:
    # Power of i in a*b = i^k (a^b), with Y = iXZ for every operand
    xa, za = a & 1, a >> 1
    xb, zb = b & 1, b >> 1
    xc, zc = xa ^ xb, za ^ zb

    return (xa * za + xb * zb - xc * zc + 2 * za * xb) % 4


# Phase classes as powers of the imaginary unit
PHASE_SYMBOLS = ("+", "+i", "-", "-i")


def pauli_mul(a: Pauli, b: Pauli) -> Tuple[Pauli, str]:
    """
    Multiply two single-qubit Paulis.

    Parameters
    ----------
    a : Pauli
        Left operand.
    b : Pauli
        Right operand.

    Returns
    -------
    product : Pauli
        The product modulo phase.
    phase : str
        The phase class, one of "+", "+i", "-", "-i"; `X*Z` gives
        `(Y, "-i")` and `Z*X` gives `(Y, "+i")`.
    """

    return Pauli(a ^ b), PHASE_SYMBOLS[_phase_exponent(a, b)]


class SparsePauli:
    """
    Signed multi-qubit Pauli operator keyed by qubit coordinate.

    Only non-identity entries are stored. Products keep track of the powers of
    `i` produced by `Y = iXZ`; products of commuting Hermitian operators are
    Hermitian, so the result is always stored with a real sign. Multiplying
    anticommuting operators is rejected by `__mul__` (use `multiply` to get
    the raw phase).
    """

    __slots__ = ("_support", "_sign", "_hash")

    def __init__(self, support: Optional[Mapping[Coord, Pauli]] = None, sign: int = 1):
        if sign not in (1, -1):
            raise ValueError(f"invalid sign {sign}")

        self._support: Dict[Coord, Pauli] = {
            coord: Pauli(pauli)
            for coord, pauli in (support or {}).items()
            if pauli != Pauli.I
        }
        self._sign = sign
        self._hash = None

    @classmethod
    def single(cls, coord: Coord, pauli: Pauli, sign: int = 1) -> "SparsePauli":
        return cls({coord: pauli}, sign)

    @classmethod
    def uniform(cls, coords: Iterable[Coord], pauli: Pauli, sign: int = 1) -> "SparsePauli":
        """
        Build a tensor product of the same Pauli on all `coords`.
        """

        return cls({coord: pauli for coord in coords}, sign)

    @property
    def support(self) -> Mapping[Coord, Pauli]:
        return MappingProxyType(self._support)

    @property
    def sign(self) -> int:
        return self._sign

    @property
    def is_identity(self) -> bool:
        return not self._support

    @property
    def weight(self) -> int:
        return len(self._support)

    def __getitem__(self, coord: Coord) -> Pauli:
        # restriction to a single qubit
        return self._support.get(coord, Pauli.I)

    def __iter__(self) -> Iterator[Coord]:
        return iter(self._support)

    def __len__(self) -> int:
        return len(self._support)

    def restrict(self, coords: Iterable[Coord]) -> "SparsePauli":
        return SparsePauli({c: self._support[c] for c in coords if c in self._support})

    def unsigned(self) -> "SparsePauli":
        return SparsePauli(self._support)

    def negated(self) -> "SparsePauli":
        return SparsePauli(self._support, -self._sign)

    def x_part(self) -> "SparsePauli":
        return SparsePauli({c: Pauli.X for c, p in self._support.items() if p.has_x})

    def z_part(self) -> "SparsePauli":
        return SparsePauli({c: Pauli.Z for c, p in self._support.items() if p.has_z})

    def multiply(self, other: "SparsePauli") -> Tuple[Dict[Coord, Pauli], int]:
        """
        Return the support of `self * other` and the total power of `i`
        (signs included) of the product.
        """

        support = dict(self._support)
        exponent = 0 if self._sign * other._sign == 1 else 2
        for coord, pauli in other._support.items():
            mine = support.get(coord, Pauli.I)
            exponent += _phase_exponent(mine, pauli)
            support[coord] = Pauli(mine ^ pauli)

        return support, exponent % 4

    def __mul__(self, other: "SparsePauli") -> "SparsePauli":
        support, exponent = self.multiply(other)
        if exponent % 2:
            raise ValueError("product of anticommuting operators is not Hermitian")

        return SparsePauli(support, 1 if exponent == 0 else -1)

    def commutes(self, other: "SparsePauli") -> bool:
        return commutes(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparsePauli):
            return NotImplemented
        return self._sign == other._sign and self._support == other._support

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((frozenset(self._support.items()), self._sign))
        return self._hash

    def __str__(self) -> str:
        if not self._support:
            return "+I" if self._sign == 1 else "-I"

        body = "*".join(
            f"{self._support[coord].name}({coord})" for coord in sorted(self._support)
        )
        return ("+" if self._sign == 1 else "-") + body

    def __repr__(self) -> str:
        return f"SparsePauli:{str(self)}"


def commutes(a: SparsePauli, b: SparsePauli) -> bool:
    """
    Return whether two multi-qubit Paulis commute.

    Two operators commute iff they hold distinct non-identity Paulis on an even
    number of shared coordinates.
    """

    if len(a) > len(b):
        a, b = b, a

    count = 0
    for coord, pauli in a.support.items():
        if pauli.anticommutes(b[coord]):
            count += 1

    return count % 2 == 0


class MidCycleLabel(enum.IntEnum):
    """
    Checkpoints within a round, each naming the state after a physical layer.
    """

    PostReset = 0
    AfterLayer1 = 1
    HalfCycle = 2
    PostS = 3
    WaningCrescent = 4
    PreMeasure = 5
    EndCycle = 6

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class Timestamp:
    """
    A mid-cycle checkpoint of a given round, ordered by (round, label).
    """

    round: int
    label: MidCycleLabel

    def __post_init__(self):
        if self.round < 0:
            raise ValueError(f"negative round {self.round}")

    def __str__(self) -> str:
        return f"{self.label.name}:{self.round}"


def timestamp_before(a: Timestamp, b: Timestamp) -> bool:
    """
    Strict temporal precedence between two timestamps.
    """

    return a < b


class ResetLocation(NamedTuple):
    """
    Reset of `coord` in the `basis` basis at the beginning of round `round`.
    """

    basis: Pauli
    coord: Coord
    round: int

    def __str__(self) -> str:
        return f"R{self.basis.name}({self.coord})@{self.round}"


class MeasurementLocation(NamedTuple):
    """
    Measurement of `coord` in the `basis` basis at the end of round `round`.
    """

    basis: Pauli
    coord: Coord
    round: int

    def sort_key(self) -> Tuple[int, Coord, int]:
        return (self.round, self.coord, int(self.basis))

    def __str__(self) -> str:
        return f"M{self.basis.name}({self.coord})@{self.round}"
