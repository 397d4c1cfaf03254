"""Quasilinearity of ray pairs, QL-stars and their order theory in a finite universe.

Every set-valued notion here is relative to a :class:`Universe`: QL-stars are
intersected with the universe, the quasiorder compares relative stars, and a
convex hull means the universe rays lying in the tropical hull. Relative
answers can differ from the absolute ones over the whole ray space.

Sets of universe rays are handled as Python ints used as bitmasks; the public
functions accept rays or indices and return frozensets of indices.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .qform import CsValue, FormError, GramForm, eval_q, vadd, vscale
from .rayspace import (
    Ray, cs_rays, format_ray, hull_member, interval_member, interval_skeleton,
    is_g_isotropic, make_ray, representatives,
)
from .tscalar import TANGIBLE, Scalar, add

log = logging.getLogger(__name__)

__all__ = [
    "PreconditionError", "CapExceeded", "Universe", "is_ql_pair", "oracle_is_ql_pair",
    "is_nu_ql_pair", "is_excessive_pair", "build_universe", "ql_star", "ql_of_set",
    "sat_ql", "preceq", "ql_equiv", "is_quasilinear_set", "hull_in_universe",
    "is_convex_in_universe", "enlargement", "max_enlargement", "amalgamate",
    "atomic_cover", "max_ql_sets", "tilde_c", "star_convexity", "nonconvex_witness",
    "Enlargement", "Amalgamation", "StarConvexity", "Witness", "all_cliques",
]

DEFAULT_CAP = 5000
CLIQUE_CAP = 100_000


class PreconditionError(ValueError):
    """An operation was called outside its precondition."""


class CapExceeded(RuntimeError):
    """A configured size cap was hit."""


# -- pair decisions ----------------------------------------------------------

def is_ql_pair(f: GramForm, X: Sequence, Y: Sequence) -> bool:
    """CS <= e, or (discrete) CS = c0 with both rays g-isotropic."""
    cs = cs_rays(f, X, Y)
    if cs.le_e():
        return True
    if f.spec.discrete and cs.is_c0():
        return is_g_isotropic(f, X) and is_g_isotropic(f, Y)
    return False


def is_nu_ql_pair(f: GramForm, X: Sequence, Y: Sequence) -> bool:
    cs = cs_rays(f, X, Y)
    if cs.is_zero:
        return True
    return cs.mag <= (1 if f.spec.discrete else 0)


def is_excessive_pair(f: GramForm, X: Sequence, Y: Sequence) -> bool:
    return not is_ql_pair(f, X, Y)


def _monomials(f: GramForm, P) -> List:
    out = [f.qm[i] + 2 * p for i, p in enumerate(P) if p is not None and f.qm[i] is not None]
    out.extend(s.mag + P[i] + P[j] for (i, j), s in f.cross_list
               if P[i] is not None and P[j] is not None)
    return out


def _mixed(f: GramForm, X, Y) -> List:
    out = []
    for (i, j), s in f.cross_list:
        if X[i] is not None and Y[j] is not None:
            out.append(s.mag + X[i] + Y[j])
        if X[j] is not None and Y[i] is not None:
            out.append(s.mag + X[j] + Y[i])
    return out


def _critical_shifts(f: GramForm, X, Y) -> List:
    """Shifts s of X where some monomial of q(sX), s*b(X,Y), q(Y) ties another."""
    groups = ((2, _monomials(f, X)), (1, _mixed(f, X, Y)), (0, _monomials(f, Y)))
    crit = set()
    for k in range(len(X)):
        if X[k] is not None and Y[k] is not None:
            crit.add(Fraction(Y[k] - X[k]))
    for (a1, g1), (a2, g2) in itertools.combinations(groups, 2):
        for c1 in set(g1):
            for c2 in set(g2):
                crit.add(Fraction(c2 - c1) / (a1 - a2))
    pts = sorted(crit) or [Fraction(0)]
    if f.spec.discrete:
        ints = set()
        for p in pts:
            ints.update((math.floor(p), math.ceil(p)))
        for a, b in zip(pts, pts[1:]):
            if math.floor(a) + 1 < b:
                ints.add(math.floor(a) + 1)
        ints.update((math.floor(pts[0]) - 1, math.ceil(pts[-1]) + 1))
        return sorted(Fraction(v) for v in ints)
    vals = set(pts)
    vals.update((a + b) / 2 for a, b in zip(pts, pts[1:]))
    vals.update((pts[0] - 1, pts[-1] + 1))
    return sorted(vals)


def oracle_is_ql_pair(f: GramForm, X: Sequence, Y: Sequence) -> bool:
    """Decide quasilinearity of q on Rx + Ry by direct evaluation.

    Checks q(u + v) = q(u) + q(v) for u = lambda*x', v = y' over every tag
    pattern x' of X, y' of Y and every critical magnitude of lambda, plus one
    magnitude inside each open range and one beyond each end. Uses only
    vector arithmetic, never the CS-ratio.
    """
    X, Y = make_ray(X), make_ray(Y)
    crit = _critical_shifts(f, X, Y)
    # rescale the value group by the common denominator so that all
    # arithmetic below runs on integers; this is an order isomorphism
    D = _common_denominator(f, X, Y, crit)
    if D != 1:
        f = _scaled_form(f, D)
        X = make_ray(None if v is None else v * D for v in X)
        Y = make_ray(None if v is None else v * D for v in Y)
        crit = [s * D for s in crit]
    spec = f.spec
    shifts = [Scalar(TANGIBLE, s, spec) for s in crit]
    xs = representatives(X, spec)
    ys = [(y, eval_q(f, y)) for y in representatives(Y, spec)]
    for x in xs:
        for lam in shifts:
            u = vscale(lam, x)
            qu = eval_q(f, u)
            for y, qy in ys:
                if eval_q(f, vadd(u, y)) != add(qu, qy):
                    return False
    return True


def _common_denominator(f: GramForm, X, Y, extra) -> int:
    dens = [Fraction(v).denominator for v in itertools.chain(X, Y, extra) if v is not None]
    for s in itertools.chain(f.diag, f.selfs, f.cross.values()):
        if not s.is_zero:
            dens.append(Fraction(s.mag).denominator)
    D = 1
    for d in dens:
        D = D * d // math.gcd(D, d)
    return D


def _scaled_form(f: GramForm, D: int) -> GramForm:
    def sc(s):
        return s if s.is_zero else Scalar(s.tag, s.mag * D, f.spec)
    return GramForm([sc(s) for s in f.diag], {k: sc(v) for k, v in f.cross.items()},
                    [sc(s) for s in f.selfs], f.spec, allow_isotropic=f.allow_isotropic)


# -- universes ---------------------------------------------------------------

def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Universe:
    """Finite ordered set of distinct rays with cached QL adjacency (loops included)."""

    def __init__(self, form: GramForm, rays: Sequence, adjacency: Optional[Sequence[int]] = None):
        self.form = form
        self.rays: List[Ray] = []
        self.index: Dict[Ray, int] = {}
        for r in rays:
            r = make_ray(r, form.spec)
            if len(r) != form.n:
                raise FormError(f"ray {format_ray(r)} has wrong dimension")
            if r not in self.index:
                self.index[r] = len(self.rays)
                self.rays.append(r)
        n = len(self.rays)
        if adjacency is None:
            adj = [0] * n
            for i in range(n):
                for j in range(i, n):
                    if is_ql_pair(form, self.rays[i], self.rays[j]):
                        adj[i] |= 1 << j
                        adj[j] |= 1 << i
        else:
            adj = list(adjacency)
        for i in range(n):
            if not (adj[i] >> i) & 1:
                raise PreconditionError(f"ray {format_ray(self.rays[i])} is not QL with itself")
        self.adj: List[int] = adj
        self.full = (1 << n) - 1
        # up[i]: rays whose star contains star(i); down[i]: rays whose star is inside it
        up = [0] * n
        down = [0] * n
        for i in range(n):
            si = adj[i]
            for j in range(n):
                if si & ~adj[j] == 0:
                    up[i] |= 1 << j
                    down[j] |= 1 << i
        self.up = up
        self.down = down

    def __len__(self):
        return len(self.rays)

    def __iter__(self):
        return iter(self.rays)

    def idx(self, X: Union[int, Sequence]) -> int:
        if isinstance(X, int):
            if not 0 <= X < len(self.rays):
                raise PreconditionError(f"index {X} outside the universe")
            return X
        r = X if isinstance(X, Ray) else make_ray(X)
        try:
            return self.index[r]
        except KeyError:
            raise PreconditionError(f"ray {format_ray(r)} is not in the universe") from None

    def mask(self, S: Iterable) -> int:
        m = 0
        for X in S:
            m |= 1 << self.idx(X)
        return m

    def members(self, mask: int) -> FrozenSet[int]:
        return frozenset(_bits(mask))

    def sorted_members(self, mask: int) -> List[int]:
        return sorted(_bits(mask))

    def adjacent(self, i: int, j: int) -> bool:
        return bool((self.adj[i] >> j) & 1)

    def star_mask(self, S_mask: int) -> int:
        """Relative QL(S) for a nonempty set S."""
        out = self.full
        for i in _bits(S_mask):
            out &= self.adj[i]
        return out

    def hull_mask(self, S_mask: int) -> int:
        gens = [self.rays[i] for i in _bits(S_mask)]
        if not gens:
            return 0
        out = 0
        for k, r in enumerate(self.rays):
            if (S_mask >> k) & 1 or hull_member(r, gens):
                out |= 1 << k
        return out

    def label(self, i: int) -> str:
        return format_ray(self.rays[i])


def build_universe(f: GramForm, gens: Sequence, closure="none", cap: int = DEFAULT_CAP) -> Universe:
    """Universe from generator rays with an optional closure.

    ``closure`` is ``"none"``, ``"subset_sums"`` (normalized pointwise maxima
    of all nonempty generator subsets) or ``("skeleton", depth)`` (pairwise
    interval skeletons, iterated ``depth`` times).
    """
    gens = [make_ray(g, f.spec) for g in gens]
    if not gens:
        raise PreconditionError("a universe needs at least one generator")
    for g in gens:
        if len(g) != f.n:
            raise FormError("generator dimension does not match the form")
    rays: List[Ray] = []
    seen = set()

    def push(r):
        if r not in seen:
            seen.add(r)
            rays.append(r)
            if len(rays) > cap:
                raise CapExceeded(f"universe exceeds cap {cap}")

    for g in gens:
        push(g)
    kind, depth = _closure_kind(closure)
    if kind == "subset_sums":
        uniq = list(rays)
        if len(uniq) > 20:
            raise CapExceeded("subset sums over more than 20 generators")
        for k in range(2, len(uniq) + 1):
            for combo in itertools.combinations(uniq, k):
                vals = []
                for coords in zip(*combo):
                    finite = [c for c in coords if c is not None]
                    vals.append(max(finite) if finite else None)
                push(make_ray(vals))
    elif kind == "skeleton":
        for _ in range(depth):
            current = list(rays)
            for A, B in itertools.combinations(current, 2):
                for Z in interval_skeleton(f, A, B):
                    push(Z)
    return Universe(f, rays)


def _closure_kind(closure):
    if closure in (None, "none"):
        return "none", 0
    if closure == "subset_sums":
        return "subset_sums", 0
    if isinstance(closure, (tuple, list)) and len(closure) == 2 and closure[0] == "skeleton":
        return "skeleton", int(closure[1])
    if isinstance(closure, str) and closure.startswith("skeleton"):
        inner = closure[len("skeleton"):].strip("()")
        return "skeleton", int(inner or 1)
    raise PreconditionError(f"unknown closure {closure!r}")


# -- stars, saturation and order ---------------------------------------------

def ql_star(U: Universe, X) -> FrozenSet[int]:
    return U.members(U.adj[U.idx(X)])


def ql_of_set(U: Universe, S: Iterable) -> FrozenSet[int]:
    m = U.mask(S)
    if not m:
        raise PreconditionError("QL of the empty set is not defined here")
    return U.members(U.star_mask(m))


def _sat_mask(U: Universe, m: int) -> int:
    inner = U.star_mask(m)
    if not inner:
        raise PreconditionError("saturation needs QL(S) to be nonempty")
    return U.star_mask(inner)


def sat_ql(U: Universe, S: Iterable) -> FrozenSet[int]:
    m = U.mask(S)
    if not m:
        raise PreconditionError("saturation of the empty set")
    return U.members(_sat_mask(U, m))


def preceq(U: Universe, X, Y) -> bool:
    i, j = U.idx(X), U.idx(Y)
    return bool((U.up[i] >> j) & 1)


def ql_equiv(U: Universe, X, Y) -> bool:
    return U.adj[U.idx(X)] == U.adj[U.idx(Y)]


def is_quasilinear_set(U: Universe, C: Iterable) -> bool:
    m = U.mask(C)
    return _is_clique(U, m)


def _is_clique(U: Universe, m: int) -> bool:
    for i in _bits(m):
        if m & ~U.adj[i]:
            return False
    return True


def hull_in_universe(U: Universe, S: Iterable) -> FrozenSet[int]:
    return U.members(U.hull_mask(U.mask(S)))


def is_convex_in_universe(U: Universe, C: Iterable) -> bool:
    m = U.mask(C)
    return U.hull_mask(m) == m


# -- enlargements ------------------------------------------------------------

@dataclass
class Enlargement:
    result: FrozenSet[int]
    mother: FrozenSet[int]          # disjoint mother set D minus C
    quasilinear: bool


def _require_ql_convex(U: Universe, m: int, what: str = "C"):
    if not m:
        raise PreconditionError(f"{what} must be nonempty")
    if not _is_clique(U, m):
        raise PreconditionError(f"{what} is not quasilinear")
    if U.hull_mask(m) != m:
        raise PreconditionError(f"{what} is not convex relative to the universe")


def _dominated_from(U: Universe, C_mask: int) -> int:
    """Rays Z with X <= Z for some X in C: the union of the saturations."""
    out = 0
    for i in _bits(C_mask):
        out |= U.up[i]
    return out


def enlargement(U: Universe, C: Iterable, D: Iterable) -> Enlargement:
    c, d = U.mask(C), U.mask(D)
    _require_ql_convex(U, c)
    bad = d & ~_dominated_from(U, c)
    if bad:
        names = ", ".join(U.label(i) for i in _bits(bad))
        raise PreconditionError(f"mother-set condition fails for {names}")
    res = U.hull_mask(c | d)
    return Enlargement(U.members(res), U.members(d & ~c), _is_clique(U, res))


def max_enlargement(U: Universe, C: Iterable) -> FrozenSet[int]:
    c = U.mask(C)
    _require_ql_convex(U, c)
    return U.members(U.hull_mask(_dominated_from(U, c)))


@dataclass
class Amalgamation:
    C0: FrozenSet[int]
    C: FrozenSet[int]
    special: bool
    very_special: bool
    mother: FrozenSet[int]


def _check_enlargement_pair(U: Universe, c0: int, c: int) -> int:
    """Validate C0 in C as a relative QL-enlargement; return its disjoint mother set."""
    _require_ql_convex(U, c0, "C0")
    _require_ql_convex(U, c, "C")
    if c0 & ~c:
        raise PreconditionError("C0 is not contained in C")
    mother = c & _dominated_from(U, c0) & ~c0
    if U.hull_mask(mother | c0) != c:
        raise PreconditionError("C is not an enlargement of C0")
    return mother


def amalgamate(U: Universe, family: Sequence[Tuple[Iterable, Iterable]]) -> Amalgamation:
    if not family:
        raise PreconditionError("empty family")
    union0 = union = mother = 0
    for C0, C in family:
        c0, c = U.mask(C0), U.mask(C)
        mother |= _check_enlargement_pair(U, c0, c)
        union0 |= c0
        union |= c
    h0 = U.hull_mask(union0)
    h = U.hull_mask(union)
    special = h == union
    very = special and h0 == union0
    return Amalgamation(U.members(h0), U.members(h), special, very, U.members(mother & ~h0))


def atomic_cover(U: Universe, C1: Iterable, C: Iterable) -> List[Tuple[FrozenSet[int], FrozenSet[int]]]:
    """Atomic enlargements ({X_i} in C & sat(X_i)) whose amalgamation encompasses C1 in C."""
    c1, c = U.mask(C1), U.mask(C)
    _check_enlargement_pair(U, c1, c)
    D = c & _dominated_from(U, c1)
    chosen = []
    uncovered = D
    for i in U.sorted_members(c1):
        if uncovered & U.up[i]:
            chosen.append(i)
            uncovered &= ~U.up[i]
    if uncovered:
        raise PreconditionError("mother set not covered by C1")
    return [(frozenset({i}), U.members(c & U.up[i])) for i in chosen]


# -- maximal quasilinear sets --------------------------------------------------

def _bk(U: Universe, nbr: List[int], R: int, P: int, X: int, out: List[int], cap: int):
    if not P and not X:
        out.append(R)
        if len(out) > cap:
            raise CapExceeded(f"more than {cap} maximal cliques")
        return
    pivot, best = -1, -1
    for u in _bits(P | X):
        k = bin(P & nbr[u]).count("1")
        if k > best:
            pivot, best = u, k
    for v in list(_bits(P & ~nbr[pivot])):
        bit = 1 << v
        _bk(U, nbr, R | bit, P & nbr[v], X & nbr[v], out, cap)
        P &= ~bit
        X |= bit


def _max_masks(U: Universe, c: int, cap: int = CLIQUE_CAP) -> List[int]:
    if not c:
        raise PreconditionError("C must be nonempty")
    if not _is_clique(U, c):
        raise PreconditionError("C is not quasilinear")
    cand = U.star_mask(c) & ~c
    nbr = [a & ~(1 << i) for i, a in enumerate(U.adj)]
    out: List[int] = []
    _bk(U, nbr, c, cand, 0, out, cap)
    return sorted(out)


def max_ql_sets(U: Universe, C: Iterable, cap: int = CLIQUE_CAP,
                check_convex: bool = True) -> List[FrozenSet[int]]:
    """All maximal quasilinear subsets of U containing C."""
    masks = _max_masks(U, U.mask(C), cap)
    if check_convex:
        for m in masks:
            if U.hull_mask(m) != m:
                log.warning("maximal quasilinear set %s is not convex in the universe",
                            [U.label(i) for i in _bits(m)])
    return [U.members(m) for m in masks]


def tilde_c(U: Universe, C: Iterable, cap: int = CLIQUE_CAP) -> FrozenSet[int]:
    masks = _max_masks(U, U.mask(C), cap)
    out = U.full
    for m in masks:
        out &= m
    return U.members(out)


def all_cliques(U: Universe, limit: int = CLIQUE_CAP) -> List[int]:
    """Every nonempty clique of the QL-graph as a bitmask (small universes only)."""
    nbr = [a & ~(1 << i) for i, a in enumerate(U.adj)]
    out: List[int] = []

    def grow(R, P):
        out.append(R)
        if len(out) > limit:
            raise CapExceeded(f"more than {limit} cliques")
        for v in list(_bits(P)):
            P &= ~(1 << v)
            grow(R | (1 << v), P & nbr[v])

    for v in range(len(U)):
        grow(1 << v, nbr[v] & ~((1 << (v + 1)) - 1))
    return out


# -- convexity of QL-stars -----------------------------------------------------

@dataclass
class Witness:
    Y1: Ray
    Y2: Ray
    Z: Ray
    lambda0: Optional[Fraction] = None
    certificate: Dict[str, bool] = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return bool(self.certificate) and all(self.certificate.values())


@dataclass
class StarConvexity:
    convex: bool
    theorem_applies: bool
    witness: Optional[Witness] = None
    pairs_checked: int = 0


def certify_witness(f: GramForm, X1, Y1, Y2, Z) -> Dict[str, bool]:
    c0 = CsValue(1)
    return {
        "cs(X1,Y1)=c0": cs_rays(f, X1, Y1) == c0,
        "cs(X1,Y2)=c0": cs_rays(f, X1, Y2) == c0,
        "cs(X1,Z)=c0": cs_rays(f, X1, Z) == c0,
        "Y1 g-isotropic": is_g_isotropic(f, Y1),
        "Y2 g-isotropic": is_g_isotropic(f, Y2),
        "Z g-anisotropic": not is_g_isotropic(f, Z),
        "Z in [Y1,Y2]": interval_member(Z, Y1, Y2),
        "Z not in QL(X1)": not is_ql_pair(f, X1, Z),
        "Y1 in QL(X1)": is_ql_pair(f, X1, Y1),
        "Y2 in QL(X1)": is_ql_pair(f, X1, Y2),
    }


def star_convexity(U: Universe, f: GramForm, X) -> StarConvexity:
    """Check the QL-star of X along interval skeletons between its universe members."""
    i = U.idx(X)
    Xr = U.rays[i]
    applies = (not f.spec.discrete) or (not is_g_isotropic(f, Xr))
    star = U.sorted_members(U.adj[i])
    checked = 0
    for a, b in itertools.combinations(star, 2):
        Y1, Y2 = U.rays[a], U.rays[b]
        checked += 1
        for Z in interval_skeleton(f, Y1, Y2, partners=[Xr]):
            if not is_ql_pair(f, Xr, Z):
                w = Witness(Y1, Y2, Z)
                w.certificate = {
                    "Y1 in QL(X)": True, "Y2 in QL(X)": True,
                    "Z in [Y1,Y2]": interval_member(Z, Y1, Y2),
                    "Z not in QL(X)": True,
                }
                if applies:
                    log.error("convexity theorem violated at %s", format_ray(Xr))
                return StarConvexity(False, applies, w, checked)
    return StarConvexity(True, applies, None, checked)


def nonconvex_witness(f: GramForm, X1, X2, X3) -> Witness:
    """Rays Y1, Y2 in QL(X1) and Z in [Y1, Y2] outside QL(X1), following the
    ghost-scalar construction on the line through x2 and x3.

    Returns the candidate triple together with a certificate of each claimed
    property; callers should inspect ``certified``.
    """
    if not f.spec.discrete:
        raise PreconditionError("non-convex QL-stars need a discrete semifield")
    X1, X2, X3 = (make_ray(r, f.spec) for r in (X1, X2, X3))
    if not is_g_isotropic(f, X1):
        raise PreconditionError("X1 must be g-isotropic")
    if is_g_isotropic(f, X3):
        raise PreconditionError("X3 must be g-anisotropic")
    c12, c13 = cs_rays(f, X1, X2), cs_rays(f, X1, X3)
    if not (c13.is_c0() and c12 <= c13):
        raise PreconditionError("need CS(X1,X2) <= CS(X1,X3) = c0")
    a2, a3 = q_of(f, X2), q_of(f, X3)
    from .rayspace import b_mag
    a23 = b_mag(f, X2, X3)
    if a23 is None:
        raise PreconditionError("b(x2, x3) vanishes, the bound is undefined")
    # lambda0^2 >= max(a2/a3, a3^2/a23^2) in additive notation
    lam0 = math.ceil(Fraction(max(a2 - a3, 2 * a3 - 2 * a23)) / 2)
    lam2, rho, lam1 = lam0, lam0 + 1, lam0 + 2

    def line_ray(lam):
        vals = []
        for p, r in zip(X2, X3):
            cand = [v for v in (p, None if r is None else r + lam) if v is not None]
            vals.append(max(cand) if cand else None)
        return make_ray(vals, f.spec)

    Y1, Y2, Z = line_ray(lam1), line_ray(lam2), line_ray(rho)
    w = Witness(Y1, Y2, Z, Fraction(lam0))
    w.certificate = certify_witness(f, X1, Y1, Y2, Z)
    return w


def q_of(f: GramForm, X):
    from .rayspace import q_mag
    v = q_mag(f, X)
    if v is None:
        raise FormError("q vanishes on the ray")
    return v
