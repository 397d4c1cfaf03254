"""Exact supertropical scalars.

A scalar is zero, tangible(v) or ghost(v) where v is an exact magnitude in
an additively written value group: rationals (dense kind) or integers
(discrete kind). Products add magnitudes, sums keep the larger magnitude and
turn ties into ghosts.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Optional, Union

__all__ = [
    "SemifieldError", "SemifieldSpec", "DENSE", "DISCRETE", "Scalar",
    "ZERO_TAG", "TANGIBLE", "GHOST", "tangible", "ghost", "zero", "e", "c0",
    "add", "mul", "nu", "square", "le_nu", "lt_nu", "eq_nu", "tsum", "tprod",
    "parse_scalar", "format_scalar", "as_magnitude",
]

ZERO_TAG = "0"
TANGIBLE = "t"
GHOST = "g"

Number = Union[int, Fraction, str]


class SemifieldError(ValueError):
    """Mixed or malformed semifield data."""


class SemifieldSpec:
    """Which value group magnitudes live in: ``dense`` (Q) or ``discrete`` (Z)."""

    __slots__ = ("kind",)
    _cache: dict = {}

    def __new__(cls, kind: str):
        if kind not in ("dense", "discrete"):
            raise SemifieldError(f"unknown semifield kind {kind!r}")
        inst = cls._cache.get(kind)
        if inst is None:
            inst = object.__new__(cls)
            object.__setattr__(inst, "kind", kind)
            cls._cache[kind] = inst
        return inst

    def __setattr__(self, name, value):
        raise AttributeError("SemifieldSpec is immutable")

    def __reduce__(self):
        return (SemifieldSpec, (self.kind,))

    @property
    def discrete(self) -> bool:
        return self.kind == "discrete"

    @property
    def c0(self) -> "Scalar":
        """Smallest ghost above e; only exists for the discrete kind."""
        if not self.discrete:
            raise SemifieldError("dense semifields have no c0")
        return Scalar._make(GHOST, 1, self)

    def magnitude(self, value: Number):
        """Coerce ``value`` into this group's magnitude type, or raise."""
        v = as_magnitude(value)
        if self.discrete:
            if v.denominator != 1:
                raise SemifieldError(f"discrete magnitude must be an integer, got {v}")
            return int(v)
        # integral magnitudes are kept as ints for speed; they compare and
        # hash equal to the corresponding Fractions
        return int(v) if v.denominator == 1 else v

    def __repr__(self):
        return f"SemifieldSpec({self.kind!r})"


DENSE = SemifieldSpec("dense")
DISCRETE = SemifieldSpec("discrete")


def as_magnitude(value: Number) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise SemifieldError("booleans are not magnitudes")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        # floats are accepted only when exact
        return Fraction(value)
    raise SemifieldError(f"cannot read magnitude from {value!r}")


class Scalar:
    """Immutable supertropical element. Use the module constructors."""

    __slots__ = ("tag", "mag", "spec")

    def __init__(self, tag: str, mag: Optional[Number] = None, spec: SemifieldSpec = DENSE):
        if tag == ZERO_TAG:
            if mag is not None:
                raise SemifieldError("zero carries no magnitude")
            m = None
        elif tag in (TANGIBLE, GHOST):
            if mag is None:
                raise SemifieldError("nonzero scalar needs a magnitude")
            m = spec.magnitude(mag)
        else:
            raise SemifieldError(f"unknown tag {tag!r}")
        object.__setattr__(self, "tag", tag)
        object.__setattr__(self, "mag", m)
        object.__setattr__(self, "spec", spec)

    @classmethod
    def _make(cls, tag, mag, spec):
        # trusted constructor, no validation
        s = object.__new__(cls)
        _set_tag(s, tag)
        _set_mag(s, mag)
        _set_spec(s, spec)
        return s

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    def __reduce__(self):
        return (Scalar, (self.tag, self.mag, self.spec))

    @property
    def is_zero(self) -> bool:
        return self.tag == ZERO_TAG

    @property
    def is_tangible(self) -> bool:
        return self.tag == TANGIBLE

    @property
    def is_ghost(self) -> bool:
        return self.tag == GHOST

    def __eq__(self, other):
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.tag == other.tag and self.mag == other.mag and self.spec is other.spec

    def __hash__(self):
        return hash((self.tag, self.mag, self.spec.kind))

    def __add__(self, other):
        return add(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __repr__(self):
        return f"Scalar({format_scalar(self)!r}, {self.spec.kind})"

    def __str__(self):
        return format_scalar(self)


# slot setters that skip the immutability guard in __setattr__
_set_tag = Scalar.tag.__set__
_set_mag = Scalar.mag.__set__
_set_spec = Scalar.spec.__set__


def tangible(v: Number, spec: SemifieldSpec = DENSE) -> Scalar:
    return Scalar(TANGIBLE, v, spec)


def ghost(v: Number, spec: SemifieldSpec = DENSE) -> Scalar:
    return Scalar(GHOST, v, spec)


_ZEROS: dict = {}


def zero(spec: SemifieldSpec = DENSE) -> Scalar:
    z = _ZEROS.get(spec)
    if z is None:
        z = _ZEROS[spec] = Scalar._make(ZERO_TAG, None, spec)
    return z


def e(spec: SemifieldSpec = DENSE) -> Scalar:
    return Scalar._make(GHOST, spec.magnitude(0), spec)


def c0(spec: SemifieldSpec = DISCRETE) -> Scalar:
    return spec.c0


def _same(a: Scalar, b: Scalar) -> SemifieldSpec:
    if a.spec is not b.spec:
        raise SemifieldError(f"mixed semifields: {a.spec.kind} and {b.spec.kind}")
    return a.spec


def add(a: Scalar, b: Scalar) -> Scalar:
    if a.spec is not b.spec:
        _same(a, b)
    if a.tag == ZERO_TAG:
        return b
    if b.tag == ZERO_TAG:
        return a
    if a.mag > b.mag:
        return a
    if b.mag > a.mag:
        return b
    if a.tag == GHOST:
        return a
    if b.tag == GHOST:
        return b
    return Scalar._make(GHOST, a.mag, a.spec)


def mul(a: Scalar, b: Scalar) -> Scalar:
    spec = a.spec
    if spec is not b.spec:
        _same(a, b)
    if a.tag == ZERO_TAG:
        return a
    if b.tag == ZERO_TAG:
        return b
    tag = TANGIBLE if (a.tag == TANGIBLE and b.tag == TANGIBLE) else GHOST
    return Scalar._make(tag, a.mag + b.mag, spec)


def nu(a: Scalar) -> Scalar:
    if a.tag == ZERO_TAG or a.tag == GHOST:
        return a
    return Scalar._make(GHOST, a.mag, a.spec)


def square(a: Scalar) -> Scalar:
    if a.tag == ZERO_TAG:
        return a
    return Scalar._make(a.tag, 2 * a.mag, a.spec)


def _key(a: Scalar):
    return (0, 0) if a.tag == ZERO_TAG else (1, a.mag)


def le_nu(a: Scalar, b: Scalar) -> bool:
    return _key(a) <= _key(b)


def lt_nu(a: Scalar, b: Scalar) -> bool:
    return _key(a) < _key(b)


def eq_nu(a: Scalar, b: Scalar) -> bool:
    return _key(a) == _key(b)


def tsum(items: Iterable[Scalar], spec: SemifieldSpec = DENSE) -> Scalar:
    """Supertropical sum of any number of scalars (empty sum is zero)."""
    best = None
    tag = ZERO_TAG
    for s in items:
        if s.spec is not spec:
            raise SemifieldError(f"mixed semifields: {s.spec.kind} and {spec.kind}")
        if s.tag == ZERO_TAG:
            continue
        if best is None or s.mag > best:
            best, tag = s.mag, s.tag
        elif s.mag == best:
            tag = GHOST
    if best is None:
        return zero(spec)
    return Scalar._make(tag, best, spec)


def tprod(items: Iterable[Scalar], spec: SemifieldSpec = DENSE) -> Scalar:
    out = Scalar._make(TANGIBLE, spec.magnitude(0), spec)
    for s in items:
        out = mul(out, s)
    return out


_SCALAR_RE = re.compile(r"^\s*(?:(0)|([tg]):\s*([+-]?\d+(?:/\d+)?))\s*$")


def parse_scalar(text: str, spec: SemifieldSpec = DENSE) -> Scalar:
    """Parse ``"t:3/2"``, ``"g:-1"`` or ``"0"``."""
    if not isinstance(text, str):
        raise SemifieldError(f"scalar encoding must be a string, got {text!r}")
    m = _SCALAR_RE.match(text)
    if not m:
        raise SemifieldError(f"malformed scalar {text!r}")
    if m.group(1):
        return zero(spec)
    try:
        frac = Fraction(m.group(3))
    except ZeroDivisionError:
        raise SemifieldError(f"malformed scalar {text!r}") from None
    return Scalar(m.group(2), frac, spec)


def format_magnitude(v) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def format_scalar(a: Scalar) -> str:
    if a.tag == ZERO_TAG:
        return "0"
    return f"{a.tag}:{format_magnitude(a.mag)}"
