"""Gaussian-CGS constants and the handful of unit conversions the package needs.

All internal computation happens in Gaussian-CGS.  SI (and a few convenience
units) are accepted only at the I/O boundary through :func:`convert`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

C_LIGHT = 2.99792458e10  # cm/s, exact
HBAR = 1.054571817e-27  # erg s
STATVOLT_IN_VOLTS = 299.792458  # exact given c
ELECTRONVOLT_IN_ERG = 1.602176634e-12


def _frac(x) -> Fraction:
    f = Fraction(x)
    if (2 * f).denominator != 1:
        raise ValueError(f"dimension exponent {x} is not a half-integer")
    return f


@dataclass(frozen=True)
class Dimension:
    """Exponents of (gram, centimeter, second), restricted to half-integers."""

    gram: Fraction = Fraction(0)
    cm: Fraction = Fraction(0)
    second: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("gram", "cm", "second"):
            object.__setattr__(self, name, _frac(getattr(self, name)))

    def __mul__(self, other: Dimension) -> Dimension:
        return Dimension(self.gram + other.gram, self.cm + other.cm, self.second + other.second)

    def __truediv__(self, other: Dimension) -> Dimension:
        return Dimension(self.gram - other.gram, self.cm - other.cm, self.second - other.second)

    def __pow__(self, n) -> Dimension:
        n = Fraction(n)
        return Dimension(self.gram * n, self.cm * n, self.second * n)

    @property
    def dimensionless(self) -> bool:
        return self.gram == 0 and self.cm == 0 and self.second == 0

    def __str__(self) -> str:
        parts = []
        for sym, e in (("g", self.gram), ("cm", self.cm), ("s", self.second)):
            if e:
                parts.append(sym if e == 1 else f"{sym}^{e}")
        return " ".join(parts) or "1"


DIMENSIONLESS = Dimension()
MASS = Dimension(gram=1)
LENGTH = Dimension(cm=1)
TIME = Dimension(second=1)
ENERGY = Dimension(1, 2, -2)
# statvolt = statC/cm with statC = g^1/2 cm^3/2 s^-1
POTENTIAL = Dimension(Fraction(1, 2), Fraction(1, 2), -1)
FORCE_PER_AREA = ENERGY / LENGTH**3


class DimensionError(TypeError):
    pass


@dataclass(frozen=True)
class Quantity:
    value: float
    dim: Dimension = DIMENSIONLESS

    def _check(self, other: Quantity) -> None:
        if self.dim != other.dim:
            raise DimensionError(f"incompatible dimensions: [{self.dim}] vs [{other.dim}]")

    def _lift(self, other) -> Quantity:
        return other if isinstance(other, Quantity) else Quantity(float(other))

    def __add__(self, other):
        other = self._lift(other)
        self._check(other)
        return Quantity(self.value + other.value, self.dim)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        self._check(other)
        return Quantity(self.value - other.value, self.dim)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return Quantity(-self.value, self.dim)

    def __mul__(self, other):
        other = self._lift(other)
        return Quantity(self.value * other.value, self.dim * other.dim)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        return Quantity(self.value / other.value, self.dim / other.dim)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, n):
        return Quantity(self.value ** float(n), self.dim ** n)

    def __float__(self) -> float:
        if not self.dim.dimensionless:
            raise DimensionError(f"quantity with dimension [{self.dim}] is not a bare number")
        return float(self.value)

    def __eq__(self, other) -> bool:
        other = self._lift(other)
        return self.dim == other.dim and self.value == other.value

    def __hash__(self):
        return hash((self.value, self.dim))


c = Quantity(C_LIGHT, LENGTH / TIME)
hbar = Quantity(HBAR, ENERGY * TIME)

# name -> (multiplier, divisor, dimension): 1 name = multiplier/divisor base units.
# Kept as a ratio so V <-> statvolt stays exact.
UNITS: dict[str, tuple[float, float, Dimension]] = {
    "statvolt": (1.0, 1.0, POTENTIAL),
    "V": (1.0, STATVOLT_IN_VOLTS, POTENTIAL),
    "mV": (1.0, STATVOLT_IN_VOLTS * 1e3, POTENTIAL),
    "cm": (1.0, 1.0, LENGTH),
    "m": (100.0, 1.0, LENGTH),
    "mm": (1.0, 10.0, LENGTH),
    "um": (1.0, 1e4, LENGTH),
    "nm": (1.0, 1e7, LENGTH),
    "s": (1.0, 1.0, TIME),
    "ns": (1.0, 1e9, TIME),
    "ps": (1.0, 1e12, TIME),
    "erg": (1.0, 1.0, ENERGY),
    "J": (1e7, 1.0, ENERGY),
    "eV": (ELECTRONVOLT_IN_ERG, 1.0, ENERGY),
}


class UnitError(ValueError):
    pass


def unit(name: str) -> Quantity:
    """One ``name`` expressed as a Gaussian-CGS :class:`Quantity`."""
    mul, div, dim = _lookup(name)
    return Quantity(mul / div, dim)


def _lookup(name: str) -> tuple[float, float, Dimension]:
    try:
        return UNITS[name]
    except KeyError:
        raise UnitError(f"unknown unit {name!r}; known: {sorted(UNITS)}") from None


def convert(value: float, from_unit: str, to_unit: str) -> float:
    smul, sdiv, sdim = _lookup(from_unit)
    dmul, ddiv, ddim = _lookup(to_unit)
    if sdim != ddim:
        raise UnitError(f"cannot convert {from_unit} [{sdim}] to {to_unit} [{ddim}]")
    return float(value) * (smul * ddiv) / (sdiv * dmul)


def dimension_of(name: str) -> Dimension:
    return _lookup(name)[2]


def to_gaussian(value: float, from_unit: str) -> float:
    """Convert to the Gaussian-CGS base unit of the same dimension."""
    mul, div, _ = _lookup(from_unit)
    return float(value) * mul / div
