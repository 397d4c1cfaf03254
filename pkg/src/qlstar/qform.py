"""Vectors and Gram-presented quadratic pairs (q, b) over a supertropical semifield."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .tscalar import (
    DENSE, GHOST, TANGIBLE, ZERO_TAG, Scalar, SemifieldError, SemifieldSpec,
    add, format_magnitude, format_scalar, le_nu, mul, nu, parse_scalar,
    square, tsum, zero,
)

__all__ = [
    "FormError", "Vector", "GramForm", "ValidationReport", "CsValue",
    "vector", "basis", "eval_q", "eval_b", "validate", "decompose",
    "cs_vectors", "is_ql_vectors", "vadd", "vscale",
]


class FormError(ValueError):
    """Bad form data or a violated form precondition."""


class Vector(tuple):
    """A tuple of scalars sharing one semifield."""

    def __new__(cls, entries: Iterable[Scalar], spec: Optional[SemifieldSpec] = None):
        entries = tuple(entries)
        if not entries:
            raise FormError("vectors must have positive dimension")
        spec = spec or entries[0].spec
        for s in entries:
            if not isinstance(s, Scalar):
                raise FormError(f"vector entry {s!r} is not a Scalar")
            if s.spec is not spec:
                raise SemifieldError("vector entries from mixed semifields")
        return super().__new__(cls, entries)

    @property
    def dim(self) -> int:
        return len(self)

    @property
    def spec(self) -> SemifieldSpec:
        return self[0].spec

    def is_zero(self) -> bool:
        return all(s.tag == ZERO_TAG for s in self)

    def __add__(self, other):
        return vadd(self, other)

    def __str__(self):
        return "(" + ", ".join(format_scalar(s) for s in self) + ")"

    def __repr__(self):
        return f"Vector{self}"


def vector(entries: Sequence, spec: SemifieldSpec = DENSE) -> Vector:
    """Build a vector from scalars or scalar encodings."""
    out = [s if isinstance(s, Scalar) else parse_scalar(str(s), spec) for s in entries]
    return Vector(out, spec)


def basis(n: int, i: int, spec: SemifieldSpec = DENSE) -> Vector:
    """The i-th standard basis vector (0-based)."""
    one = Scalar._make(TANGIBLE, spec.magnitude(0), spec)
    return Vector([one if k == i else zero(spec) for k in range(n)], spec)


def vadd(x: Vector, y: Vector) -> Vector:
    if len(x) != len(y):
        raise FormError("dimension mismatch")
    return Vector([add(a, b) for a, b in zip(x, y)], x.spec)


def vscale(a: Scalar, x: Vector) -> Vector:
    return Vector([mul(a, s) for s in x], x.spec)


@dataclass
class ValidationReport:
    ok: bool
    violations: List[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok


class CsValue:
    """A CS-ratio: either the zero value or a ghost of some magnitude."""

    __slots__ = ("is_zero", "mag")

    def __init__(self, mag=None):
        object.__setattr__(self, "is_zero", mag is None)
        object.__setattr__(self, "mag", mag)

    def __setattr__(self, name, value):
        raise AttributeError("CsValue is immutable")

    def _key(self):
        return (0, 0) if self.is_zero else (1, self.mag)

    def __eq__(self, other):
        if not isinstance(other, CsValue):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __lt__(self, other):
        return self._key() < other._key()

    def __le__(self, other):
        return self._key() <= other._key()

    def __gt__(self, other):
        return self._key() > other._key()

    def __ge__(self, other):
        return self._key() >= other._key()

    def le_e(self) -> bool:
        return self.is_zero or self.mag <= 0

    def lt_e(self) -> bool:
        return self.is_zero or self.mag < 0

    def is_c0(self) -> bool:
        return not self.is_zero and self.mag == 1

    def as_scalar(self, spec: SemifieldSpec = DENSE) -> Scalar:
        if self.is_zero:
            return zero(spec)
        return Scalar(GHOST, self.mag, spec)

    def __str__(self):
        return "0" if self.is_zero else f"g:{format_magnitude(self.mag)}"

    def __repr__(self):
        return f"CsValue({self})"


def _parse_entry(s, spec):
    if isinstance(s, Scalar):
        if s.spec is not spec:
            raise SemifieldError("form entry from a different semifield")
        return s
    return parse_scalar(str(s), spec)


class GramForm:
    """Quadratic pair presented by q(e_i), b(e_i, e_i) and b(e_i, e_j), i < j.

    ``cross`` maps 0-based pairs (i, j) with i < j to scalars; missing pairs
    are zero. ``self_entries`` is "balanced" (b(e_i, e_i) = e q(e_i)) or a
    sequence of scalars.
    """

    def __init__(self, diag: Sequence, cross=None, self_entries="balanced",
                 spec: SemifieldSpec = DENSE, allow_isotropic: bool = False,
                 check: bool = True):
        self.spec = spec
        self.diag: Tuple[Scalar, ...] = tuple(_parse_entry(s, spec) for s in diag)
        n = len(self.diag)
        if n == 0:
            raise FormError("form needs dimension >= 1")
        self.n = n
        cr: Dict[Tuple[int, int], Scalar] = {}
        items = cross.items() if isinstance(cross, dict) else (
            ((c[0], c[1]), c[2]) for c in (cross or ()))
        for (i, j), s in items:
            i, j = int(i), int(j)
            if i == j or not (0 <= i < n and 0 <= j < n):
                raise FormError(f"bad cross index ({i}, {j})")
            if i > j:
                i, j = j, i
            if (i, j) in cr:
                raise FormError(f"duplicate cross entry ({i}, {j})")
            val = _parse_entry(s, spec)
            if not val.is_zero:
                cr[(i, j)] = val
        self.cross = cr
        if isinstance(self_entries, str):
            if self_entries != "balanced":
                raise FormError(f"self entries must be 'balanced' or a list, got {self_entries!r}")
            self.selfs = tuple(nu(q) for q in self.diag)
        else:
            self.selfs = tuple(_parse_entry(s, spec) for s in self_entries)
            if len(self.selfs) != n:
                raise FormError("self entries must have one scalar per coordinate")
        self.balanced = all(b == nu(q) for b, q in zip(self.selfs, self.diag))
        self.allow_isotropic = allow_isotropic
        self._prepare()
        if check:
            rep = validate(self)
            if not rep.ok:
                raise FormError("; ".join(rep.violations))

    def _prepare(self):
        # magnitude tables for the fast ray-level routines
        n = self.n
        self.qm = [None if s.is_zero else s.mag for s in self.diag]
        self.qt = [s.is_tangible for s in self.diag]
        bm = [[None] * n for _ in range(n)]
        bt = [[False] * n for _ in range(n)]
        for i, s in enumerate(self.selfs):
            if not s.is_zero:
                bm[i][i] = s.mag
                bt[i][i] = s.is_tangible
        for (i, j), s in self.cross.items():
            bm[i][j] = bm[j][i] = s.mag
            bt[i][j] = bt[j][i] = s.is_tangible
        self.bm = bm
        self.bt = bt
        self.cross_list = sorted(self.cross.items())

    def b_entry(self, i: int, j: int) -> Scalar:
        if i == j:
            return self.selfs[i]
        if i > j:
            i, j = j, i
        return self.cross.get((i, j), zero(self.spec))

    def __eq__(self, other):
        if not isinstance(other, GramForm):
            return NotImplemented
        return (self.spec is other.spec and self.diag == other.diag
                and self.selfs == other.selfs and self.cross == other.cross)

    def __hash__(self):
        return hash((self.spec.kind, self.diag, self.selfs, tuple(sorted(self.cross.items()))))

    def __repr__(self):
        cr = ", ".join(f"({i},{j}):{format_scalar(s)}" for (i, j), s in self.cross_list)
        return (f"GramForm({self.spec.kind}, diag=[{', '.join(map(str, self.diag))}], "
                f"cross={{{cr}}}, {'balanced' if self.balanced else 'unbalanced'})")

    def to_json(self) -> dict:
        return {
            "semifield": self.spec.kind,
            "dim": self.n,
            "diag": [format_scalar(s) for s in self.diag],
            "cross": [[i + 1, j + 1, format_scalar(s)] for (i, j), s in self.cross_list],
            "self": "balanced" if self.balanced else [format_scalar(s) for s in self.selfs],
        }


def _check_dim(f: GramForm, *vs):
    for v in vs:
        if len(v) != f.n:
            raise FormError(f"dimension mismatch: form has dim {f.n}, vector has {len(v)}")
        if v.spec is not f.spec:
            raise SemifieldError("vector and form from different semifields")


def eval_q(f: GramForm, x: Vector) -> Scalar:
    """q(x) = sum_i q(e_i) x_i^2 + sum_{i<j} b(e_i, e_j) x_i x_j."""
    _check_dim(f, x)
    terms = [mul(q, square(xi)) for q, xi in zip(f.diag, x)]
    terms.extend(mul(s, mul(x[i], x[j])) for (i, j), s in f.cross_list)
    return tsum(terms, f.spec)


def eval_b(f: GramForm, x: Vector, y: Vector) -> Scalar:
    """b(x, y) = sum_i b_ii x_i y_i + sum_{i != j} b_ij x_i y_j."""
    _check_dim(f, x, y)
    terms = [mul(b, mul(xi, yi)) for b, xi, yi in zip(f.selfs, x, y)]
    for (i, j), s in f.cross_list:
        terms.append(mul(s, mul(x[i], y[j])))
        terms.append(mul(s, mul(x[j], y[i])))
    return tsum(terms, f.spec)


def validate(f: GramForm) -> ValidationReport:
    bad = []
    if not f.allow_isotropic:
        for i, q in enumerate(f.diag):
            if q.is_zero:
                bad.append(f"isotropic basis vector: q(e{i + 1}) = 0")
    for i, (b, q) in enumerate(zip(f.selfs, f.diag)):
        if not le_nu(nu(b), nu(q)):
            bad.append(f"companion invalid at e{i + 1}: e*b{i + 1}{i + 1} = {format_scalar(nu(b))}"
                       f" exceeds e*q{i + 1} = {format_scalar(nu(q))}")
    return ValidationReport(not bad, bad)


def decompose(f: GramForm) -> Tuple[GramForm, GramForm]:
    """Split q into its quasilinear (diagonal) part and the rigid cross part."""
    z = zero(f.spec)
    ql = GramForm(f.diag, None, [z] * f.n, f.spec, allow_isotropic=f.allow_isotropic)
    rigid = GramForm([z] * f.n, dict(f.cross), [z] * f.n, f.spec, allow_isotropic=True)
    return ql, rigid


def cs_vectors(f: GramForm, x: Vector, y: Vector) -> CsValue:
    """CS(x, y) = e b(x,y)^2 / (q(x) q(y)), as a magnitude."""
    qx, qy = eval_q(f, x), eval_q(f, y)
    if qx.is_zero or qy.is_zero:
        raise FormError("CS-ratio needs anisotropic arguments")
    b = eval_b(f, x, y)
    if b.is_zero:
        return CsValue()
    return CsValue(2 * b.mag - qx.mag - qy.mag)


def is_ql_vectors(f: GramForm, x: Vector, y: Vector) -> bool:
    return eval_q(f, vadd(x, y)) == add(eval_q(f, x), eval_q(f, y))
