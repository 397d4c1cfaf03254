"""Rays as normalized magnitude profiles and tropical convexity on them.

A ray is stored as a tuple whose entries are exact magnitudes or ``None``
for a zero coordinate. The largest finite entry is 0. All max-plus
computations treat ``None`` as minus infinity.
"""
from __future__ import annotations

import itertools
import math
import re
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .qform import CsValue, FormError, GramForm, Vector
from .tscalar import (
    DENSE, GHOST, TANGIBLE, ZERO_TAG, Scalar, SemifieldSpec, format_magnitude,
    zero,
)

__all__ = [
    "Ray", "RayError", "CsValue", "make_ray", "ray_of", "parse_ray", "format_ray",
    "ray_to_json", "ray_from_json", "representatives", "q_mag", "b_mag",
    "cs_rays", "g_isotropy", "is_g_isotropic", "interval_member", "hull_member",
    "principal_shifts", "hull_cell", "hull_cell_is_unique", "point_on_interval",
    "interval_skeleton", "sample_hull", "recover_endpoints", "support",
    "G_ISOTROPIC", "G_ANISOTROPIC", "ray_sort_key",
]

G_ISOTROPIC = "g_isotropic"
G_ANISOTROPIC = "g_anisotropic"


class RayError(ValueError):
    pass


def _norm_num(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    return v


class Ray(tuple):
    """Normalized profile; construct with :func:`make_ray`."""

    @property
    def dim(self) -> int:
        return len(self)

    def __str__(self):
        return format_ray(self)

    def __repr__(self):
        return f"Ray{format_ray(self)}"


def make_ray(profile: Iterable, spec: Optional[SemifieldSpec] = None) -> Ray:
    vals = []
    for v in profile:
        if v is None:
            vals.append(None)
        elif isinstance(v, (int, Fraction)) and not isinstance(v, bool):
            vals.append(Fraction(v))
        elif isinstance(v, str):
            vals.append(Fraction(v))
        else:
            raise RayError(f"bad profile entry {v!r}")
    finite = [v for v in vals if v is not None]
    if not finite:
        raise RayError("a ray needs at least one nonzero coordinate")
    top = max(finite)
    out = tuple(None if v is None else _norm_num(v - top) for v in vals)
    if spec is not None and spec.discrete:
        for v in out:
            if v is not None and Fraction(v).denominator != 1:
                raise RayError(f"discrete ray needs integer entries, got {format_ray(out)}")
    return Ray(out)


def ray_of(x: Vector) -> Ray:
    if all(s.tag == ZERO_TAG for s in x):
        raise RayError("the zero vector spans no ray")
    return make_ray(None if s.tag == ZERO_TAG else s.mag for s in x)


def support(X: Sequence) -> Tuple[int, ...]:
    return tuple(i for i, v in enumerate(X) if v is not None)


def ray_sort_key(X: Ray) -> str:
    return format_ray(X)


def format_ray(X: Sequence) -> str:
    return "(" + ", ".join("_" if v is None else format_magnitude(v) for v in X) + ")"


_ENTRY_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")


def parse_ray(text: str, spec: Optional[SemifieldSpec] = None) -> Ray:
    """Parse ``"(-3, 0, _)"``; the input need not be normalized."""
    s = text.strip()
    if not (s.startswith("(") and s.endswith(")")):
        raise RayError(f"malformed ray {text!r}")
    parts = [p.strip() for p in s[1:-1].split(",")]
    vals = []
    for p in parts:
        if p in ("_", "⊥"):
            vals.append(None)
        elif _ENTRY_RE.match(p):
            try:
                vals.append(Fraction(p))
            except ZeroDivisionError:
                raise RayError(f"malformed ray entry {p!r}") from None
        else:
            raise RayError(f"malformed ray entry {p!r} in {text!r}")
    return make_ray(vals, spec)


def ray_to_json(X: Ray) -> list:
    return [None if v is None else format_magnitude(v) for v in X]


def ray_from_json(data, spec: Optional[SemifieldSpec] = None) -> Ray:
    if isinstance(data, str):
        return parse_ray(data, spec)
    if not isinstance(data, list):
        raise RayError(f"ray must be a list or string, got {data!r}")
    vals = []
    for v in data:
        if v is None:
            vals.append(None)
        elif isinstance(v, bool):
            raise RayError(f"bad ray entry {v!r}")
        elif isinstance(v, int):
            vals.append(Fraction(v))
        elif isinstance(v, str) and _ENTRY_RE.match(v.strip()):
            vals.append(Fraction(v.strip()))
        else:
            raise RayError(f"bad ray entry {v!r}")
    return make_ray(vals, spec)


def representatives(X: Ray, spec: SemifieldSpec = DENSE) -> List[Vector]:
    """All tag patterns on the support of X, magnitudes as in the profile."""
    supp = support(X)
    out = []
    for tags in itertools.product((TANGIBLE, GHOST), repeat=len(supp)):
        entries = [zero(spec)] * len(X)
        for i, t in zip(supp, tags):
            entries[i] = Scalar(t, X[i], spec)
        out.append(Vector(entries, spec))
    return out


# -- magnitude-level evaluation -------------------------------------------

def q_mag(f: GramForm, P: Sequence):
    """Magnitude of q on any vector with profile P (None if q vanishes)."""
    best = None
    qm = f.qm
    for i, p in enumerate(P):
        if p is not None and qm[i] is not None:
            v = qm[i] + 2 * p
            if best is None or v > best:
                best = v
    for (i, j), s in f.cross_list:
        if P[i] is not None and P[j] is not None:
            v = s.mag + P[i] + P[j]
            if best is None or v > best:
                best = v
    return best


def b_mag(f: GramForm, P: Sequence, R: Sequence):
    best = None
    bm = f.bm
    n = f.n
    for i in range(n):
        pi = P[i]
        if pi is None:
            continue
        row = bm[i]
        for j in range(n):
            rj = R[j]
            if rj is None or row[j] is None:
                continue
            v = row[j] + pi + rj
            if best is None or v > best:
                best = v
    return best


def cs_rays(f: GramForm, X: Sequence, Y: Sequence) -> CsValue:
    """CS(X, Y); it depends only on the profiles, not on the tags."""
    if len(X) != f.n or len(Y) != f.n:
        raise FormError("dimension mismatch")
    qx, qy = q_mag(f, X), q_mag(f, Y)
    if qx is None or qy is None:
        raise FormError("CS-ratio needs anisotropic rays")
    b = b_mag(f, X, Y)
    if b is None:
        return CsValue()
    return CsValue(_norm_num(Fraction(2 * b - qx - qy)))


def _q_tangible(f: GramForm, P, tan) -> bool:
    # q on the vector with profile P and tangibility flags tan
    best = None
    tangible = False
    for i, p in enumerate(P):
        if p is None or f.qm[i] is None:
            continue
        v = f.qm[i] + 2 * p
        t = f.qt[i] and tan[i]
        if best is None or v > best:
            best, tangible = v, t
        elif v == best:
            tangible = False
    for (i, j), s in f.cross_list:
        if P[i] is None or P[j] is None:
            continue
        v = s.mag + P[i] + P[j]
        t = s.tag == TANGIBLE and tan[i] and tan[j]
        if best is None or v > best:
            best, tangible = v, t
        elif v == best:
            tangible = False
    return best is not None and tangible


def g_isotropy(f: GramForm, X: Sequence) -> str:
    """g-anisotropic iff some representative of X has a tangible q-value."""
    supp = support(X)
    tan = [False] * len(X)
    for pattern in itertools.product((True, False), repeat=len(supp)):
        for i, t in zip(supp, pattern):
            tan[i] = t
        if _q_tangible(f, X, tan):
            return G_ANISOTROPIC
    return G_ISOTROPIC


def is_g_isotropic(f: GramForm, X: Sequence) -> bool:
    return g_isotropy(f, X) == G_ISOTROPIC


# -- tropical convexity ----------------------------------------------------

def principal_shifts(Z: Sequence, S: Sequence[Sequence]) -> List[Optional[Fraction]]:
    """Largest shifts a_k with max_k(a_k + S_k) <= Z; None means minus infinity."""
    out = []
    for P in S:
        a = None
        ok = True
        for z, p in zip(Z, P):
            if p is None:
                continue
            if z is None:
                ok = False
                break
            d = z - p
            if a is None or d < a:
                a = d
        out.append(a if ok else None)
    return out


def _recovers(Z, S, shifts) -> bool:
    for i, z in enumerate(Z):
        best = None
        for a, P in zip(shifts, S):
            if a is None or P[i] is None:
                continue
            v = a + P[i]
            if best is None or v > best:
                best = v
        if best != z:
            return False
    return True


def hull_member(Z: Sequence, S: Sequence[Sequence]) -> bool:
    if not S:
        raise RayError("hull of an empty set")
    S = list(S)
    shifts = principal_shifts(Z, S)
    if all(a is None for a in shifts):
        return False
    return _recovers(Z, S, shifts)


def interval_member(Z: Sequence, X: Sequence, Y: Sequence) -> bool:
    return hull_member(Z, [X, Y])


def hull_cell(Z: Sequence, S: Sequence[Sequence]) -> Optional[Tuple[int, ...]]:
    """Index set (0-based) of the decomposition cell containing Z, or None.

    This is the support of the principal solution, i.e. the largest index
    set whose finite shifts reproduce Z. See :func:`hull_cell_is_unique`.
    """
    S = list(S)
    shifts = principal_shifts(Z, S)
    if all(a is None for a in shifts) or not _recovers(Z, S, shifts):
        return None
    return tuple(k for k, a in enumerate(shifts) if a is not None)


def hull_cell_is_unique(Z: Sequence, S: Sequence[Sequence]) -> bool:
    """False when a proper subset of the cell also reproduces Z with finite shifts."""
    cell = hull_cell(Z, S)
    if cell is None:
        return True
    S = list(S)
    for r in range(1, len(cell)):
        for sub in itertools.combinations(cell, r):
            if _recovers(Z, [S[k] for k in sub], principal_shifts(Z, [S[k] for k in sub])):
                sub_shifts = principal_shifts(Z, [S[k] for k in sub])
                if all(a is not None for a in sub_shifts):
                    return False
    return True


def point_on_interval(X: Sequence, Y: Sequence, t) -> Ray:
    """normalize(max(t + X, Y)); t = +inf gives X, t = -inf gives Y."""
    if t == math.inf:
        return make_ray(X)
    if t == -math.inf:
        return make_ray(Y)
    vals = []
    for x, y in zip(X, Y):
        if x is None:
            vals.append(y)
        elif y is None:
            vals.append(t + x)
        else:
            vals.append(max(t + x, y))
    return make_ray(vals)


def _coord_lines(X, Y, k):
    # candidate linear pieces (slope, intercept) of max(t + X_k, Y_k)
    out = []
    if X[k] is not None:
        out.append((1, X[k]))
    if Y[k] is not None:
        out.append((0, Y[k]))
    return out


def _profile_lines(f: GramForm, X, Y):
    """Candidate lines of all q-monomials (and b(P, P)) on P(t)."""
    n = f.n
    lines = set()
    coords = [_coord_lines(X, Y, k) for k in range(n)]
    for i in range(n):
        for j in range(i, n):
            if i == j:
                coeffs = [c for c in (f.qm[i], f.bm[i][i]) if c is not None]
            else:
                coeffs = [f.bm[i][j]] if f.bm[i][j] is not None else []
            for c in coeffs:
                for (a1, c1) in coords[i]:
                    for (a2, c2) in coords[j]:
                        lines.add((a1 + a2, c + c1 + c2))
    return lines


def _partner_lines(f: GramForm, X, Y, W):
    n = f.n
    coords = [_coord_lines(X, Y, k) for k in range(n)]
    lines = set()
    for i in range(n):
        if W[i] is None:
            continue
        for j in range(n):
            c = f.bm[i][j]
            if c is None:
                continue
            for (a, cc) in coords[j]:
                lines.add((a, c + W[i] + cc))
    return lines


def _crossings(lines_a, lines_b, scale_a=1, offset=0):
    # t with scale_a*La(t) - Lb(t) = offset for any pair of lines
    out = set()
    for (a1, c1) in lines_a:
        for (a2, c2) in lines_b:
            slope = scale_a * a1 - a2
            if slope != 0:
                out.add(Fraction(offset - scale_a * c1 + c2) / slope)
    return out


def interval_skeleton(f: GramForm, X: Sequence, Y: Sequence,
                      partners: Sequence[Sequence] = (),
                      thresholds: Sequence = (0, 1)) -> List[Ray]:
    """Finite transversal of [X, Y] covering every combinatorial type.

    The segment is parameterized as normalize(max(t + X, Y)). Critical values
    of t are coordinate ties, ties between q-monomials (and b-monomials
    against each ray in ``partners``) and the places where CS(W, P(t))
    crosses a value in ``thresholds``. The skeleton holds both endpoints, the
    rays at critical t and one ray inside each open cell. For the discrete
    kind only integer t is used.
    """
    X, Y = make_ray(X), make_ray(Y)
    if X == Y:
        return [X]
    crit = set()
    for k in range(len(X)):
        if X[k] is not None and Y[k] is not None:
            crit.add(Fraction(Y[k] - X[k]))
    plines = _profile_lines(f, X, Y)
    crit |= _crossings(plines, plines)
    for W in partners:
        wl = _partner_lines(f, X, Y, W)
        crit |= _crossings(wl, wl)
        qw = q_mag(f, W)
        if qw is None:
            continue
        for th in thresholds:
            # 2 B(t) - Q(t) - q(W) = th
            crit |= _crossings(wl, plines, 2, th + qw)
    pts = sorted(crit)
    if not pts:
        pts = [Fraction(0)]
    ts = []
    if f.spec.discrete:
        ints = set()
        for p in pts:
            ints.add(math.floor(p))
            ints.add(math.ceil(p))
        for a, b in zip(pts, pts[1:]):
            lo = math.floor(a) + 1
            if lo < b:
                ints.add(lo)
        ints.add(math.floor(pts[0]) - 1)
        ints.add(math.ceil(pts[-1]) + 1)
        ts = sorted(ints)
    else:
        ts = list(pts)
        ts.extend((a + b) / 2 for a, b in zip(pts, pts[1:]))
        ts.append(pts[0] - 1)
        ts.append(pts[-1] + 1)
        ts.sort()
    out = [X, Y]
    seen = {X, Y}
    for t in ts:
        Z = point_on_interval(X, Y, t)
        if Z not in seen:
            seen.add(Z)
            out.append(Z)
    return out


def recover_endpoints(points: Sequence[Sequence]) -> List[Tuple[Ray, Ray]]:
    """All pairs (A, B) from ``points`` whose interval contains every point."""
    pts = [make_ray(p) for p in points]
    found = []
    for a, b in itertools.combinations(range(len(pts)), 2):
        A, B = pts[a], pts[b]
        if all(interval_member(Z, A, B) for Z in pts):
            found.append((A, B))
    return found


def sample_hull(S: Sequence[Sequence], rng, count: int,
                spec: SemifieldSpec = DENSE, spread: int = 4) -> List[Ray]:
    """Random rays of conv(S) from random shifts of random nonempty subsets."""
    S = [make_ray(P) for P in S]
    out = []
    for _ in range(count):
        k = rng.randint(1, len(S))
        chosen = rng.sample(range(len(S)), k)
        vals = [None] * len(S[0])
        for idx in chosen:
            if spec.discrete:
                a = Fraction(rng.randint(-spread, spread))
            else:
                a = Fraction(rng.randint(-spread * 6, spread * 6), rng.choice((1, 2, 3, 6)))
            for i, p in enumerate(S[idx]):
                if p is None:
                    continue
                v = a + p
                if vals[i] is None or v > vals[i]:
                    vals[i] = v
        out.append(make_ray(vals))
    return out
