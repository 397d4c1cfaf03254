"""Paths in the QL-graph of a finite universe of rays.

Everything here is relative to a :class:`~qlstar.qlcore.Universe`: stars,
saturations, upsets and downsets are intersected with the universe, so
optimality and minimality are statements about that finite graph only.
Paths are tuples of universe indices; most functions also accept rays.
"""
from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .qlcore import CapExceeded, PreconditionError, Universe, _bits
from .rayspace import interval_member, ray_sort_key, ray_to_json

log = logging.getLogger(__name__)

__all__ = [
    "QlPath", "QlGraph", "Bridge", "Reduction", "TwinAnnotation", "AnchorSet",
    "FlockPartition", "Track", "FlockModification", "AnchorDiagram", "QlBlock",
    "EntranceExit", "DominationReport",
    "build_ql_graph", "decorate", "as_path", "is_path", "is_direct",
    "basic_reduction", "reduce_to_direct", "elementary_reduction", "reduce_elementary",
    "elementary_reductions", "is_bridge", "find_bridge_support", "compose_bridges",
    "widehat_ql", "is_optimal", "admits_elementary_reduction",
    "scholium_window", "substitutions_direct", "direct_enlargement_condition",
    "enlargements", "direct_enlargements_cofinal",
    "is_enlargement_of", "dominates", "distances", "minimal_path", "is_minimal",
    "upset", "downset", "twins_and_singles", "anchor_set", "anchor_pattern",
    "is_anchor_set", "anchors_of", "is_sql_pair", "sql_cover",
    "is_direct_sql_sequence", "flocks", "tracks", "trackless", "is_flocky",
    "flock_modification", "total_flock_modification", "anchor_diagram",
    "diagram_to_dot", "ql_blocks", "entrance_exit", "entrance_modification",
    "exit_modification", "wide_entrance_modification",
    "check_domination_theorems",
]


def _order(U: Universe) -> List[int]:
    """Rank of each universe index in the lexicographic ray order (cached)."""
    rank = U.__dict__.get("_rank")
    if rank is None:
        srt = sorted(range(len(U)), key=lambda i: ray_sort_key(U.rays[i]))
        rank = [0] * len(U)
        for r, i in enumerate(srt):
            rank[i] = r
        U.__dict__["_rank"] = rank
    return rank


def _first(U: Universe, mask: int) -> Optional[int]:
    if not mask:
        return None
    rank = _order(U)
    return min(_bits(mask), key=rank.__getitem__)


def _sorted(U: Universe, mask: int) -> List[int]:
    rank = _order(U)
    return sorted(_bits(mask), key=rank.__getitem__)


# -- paths ---------------------------------------------------------------------

@dataclass(frozen=True)
class QlPath:
    universe: Universe = field(compare=False, repr=False)
    indices: Tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.indices) - 1

    @property
    def rays(self):
        return [self.universe.rays[i] for i in self.indices]

    def labels(self) -> List[str]:
        return [self.universe.label(i) for i in self.indices]

    def to_json(self) -> dict:
        return {"length": self.n, "rays": [ray_to_json(r) for r in self.rays]}

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __getitem__(self, k):
        return self.indices[k]


def as_path(U: Universe, path) -> Tuple[int, ...]:
    """Normalize a path given as QlPath, indices or rays to a tuple of indices."""
    if isinstance(path, QlPath):
        return path.indices
    out = tuple(U.idx(X) for X in path)
    if not out:
        raise PreconditionError("a path needs at least one ray")
    return out


def _wrap(U: Universe, idx: Sequence[int]) -> QlPath:
    return QlPath(U, tuple(idx))


def is_path(U: Universe, seq) -> bool:
    p = as_path(U, seq)
    return all(U.adjacent(a, b) for a, b in zip(p, p[1:]))


def _require_path(U, p):
    if not all(U.adjacent(a, b) for a, b in zip(p, p[1:])):
        raise PreconditionError("sequence is not a QL-path")


def is_direct(U: Universe, path) -> bool:
    p = as_path(U, path)
    if not is_path(U, p) or p[0] == p[-1]:
        return False
    n = len(p) - 1
    for i in range(n + 1):
        for j in range(i + 2, n + 1):
            if U.adjacent(p[i], p[j]):
                return False
    return True


def _require_direct(U, p):
    if not is_direct(U, p):
        raise PreconditionError("path is not direct")


# -- graph ---------------------------------------------------------------------

@dataclass
class QlGraph:
    vertices: List[str]
    edges: List[Tuple[int, int]]
    loops: List[int]
    arrows: List[Tuple[int, int]] = field(default_factory=list)
    equivalent: List[Tuple[int, int]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [list(e) for e in self.edges],
            "loops": list(self.loops),
            "arrows": [list(a) for a in self.arrows],
            "equivalent": [list(a) for a in self.equivalent],
        }

    def to_dot(self, name: str = "ql") -> str:
        lines = [f"graph {name} {{" if not self.arrows else f"digraph {name} {{"]
        for i, v in enumerate(self.vertices):
            lines.append(f'  v{i} [label="{v}"];')
        directed = bool(self.arrows)
        arrow_set = {tuple(a) for a in self.arrows}
        eq_set = {tuple(a) for a in self.equivalent}
        for i, j in self.edges:
            if (i, j) in eq_set:
                lines.append(f"  v{i} -> v{j} [dir=both];")
            elif (i, j) in arrow_set:
                lines.append(f"  v{i} -> v{j};")
            elif (j, i) in arrow_set:
                lines.append(f"  v{j} -> v{i};")
            else:
                lines.append(f"  v{i} -> v{j} [dir=none];" if directed else f"  v{i} -- v{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_ql_graph(U: Universe) -> QlGraph:
    n = len(U)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if U.adjacent(i, j)]
    return QlGraph([U.label(i) for i in range(n)], edges, list(range(n)))


def decorate(U: Universe) -> QlGraph:
    """QL-graph with an arrow X -> Y wherever QL(X) is strictly inside QL(Y).

    Pairs with equal stars are listed under ``equivalent`` (double arrows);
    they are not collapsed.
    """
    g = build_ql_graph(U)
    for i, j in g.edges:
        si, sj = U.adj[i], U.adj[j]
        if si == sj:
            g.equivalent.append((i, j))
        elif si & ~sj == 0:
            g.arrows.append((i, j))
        elif sj & ~si == 0:
            g.arrows.append((j, i))
    return g


# -- reductions and bridges ----------------------------------------------------

@dataclass
class Bridge:
    path: Tuple[int, ...]          # (X_0, Y_1, ..., Y_m, X_n)
    support: Tuple[int, ...]       # c(1) < ... < c(m)

    def to_json(self, U: Universe) -> dict:
        return {"path": [ray_to_json(U.rays[i]) for i in self.path],
                "support": list(self.support)}


@dataclass
class Reduction:
    path: Tuple[int, ...]
    bridge: Bridge
    position: int
    pillar: int
    direction: str


def basic_reduction(U: Universe, path, i: int, direction: str = "forward") -> Optional[QlPath]:
    p = as_path(U, path)
    _require_path(U, p)
    n = len(p) - 1
    if not 0 <= i <= n:
        raise PreconditionError(f"position {i} outside the path")
    if direction == "forward":
        ks = [k for k in range(i + 2, n + 1) if U.adjacent(p[i], p[k])]
        if not ks:
            return None
        s = max(ks)
        return _wrap(U, p[:i + 1] + p[s:])
    if direction == "backward":
        js = [j for j in range(0, i - 1) if U.adjacent(p[j], p[i])]
        if not js:
            return None
        r = min(js)
        return _wrap(U, p[:r + 1] + p[i:])
    raise PreconditionError(f"direction must be forward or backward, got {direction!r}")


def reduce_to_direct(U: Universe, path) -> Tuple[QlPath, List[QlPath]]:
    """Apply forward basic reductions at the first possible position until none apply."""
    p = as_path(U, path)
    _require_path(U, p)
    if p[0] == p[-1]:
        raise PreconditionError("endpoints coincide")
    trace = []
    while True:
        for i in range(len(p)):
            red = basic_reduction(U, p, i, "forward")
            if red is not None:
                p = red.indices
                trace.append(red)
                break
        else:
            return _wrap(U, p), trace


def elementary_reduction(U: Universe, path, i: int, Y, direction: str = "forward"
                         ) -> Optional[Reduction]:
    """One elementary reduction with pillar Y in sat(X_i), or None if none applies."""
    p = as_path(U, path)
    _require_path(U, p)
    n = len(p) - 1
    if p[0] == p[-1]:
        raise PreconditionError("endpoints coincide")
    if not 0 <= i <= n:
        raise PreconditionError(f"position {i} outside the path")
    y = U.idx(Y)
    if not (U.up[p[i]] >> y) & 1:
        raise PreconditionError(f"{U.label(y)} is not in sat(X_{i})")
    star = U.adj[y]
    hits = [k for k in range(n + 1) if (star >> p[k]) & 1]
    if direction == "forward":
        if i > 0:
            if not any(k > i + 1 for k in hits):
                return None
            s = max(hits)
            new = p[:i] + (y,) + p[s:]
            sup = tuple(range(1, i)) + (i,) + tuple(range(s, n))
        else:
            if not any(k > 2 for k in hits):
                return None
            s = max(hits)
            new = (p[0], y) + p[s:]
            sup = (0,) + tuple(range(s, n))
    elif direction == "backward":
        if i < n:
            if not any(j < i - 1 for j in hits):
                return None
            r = min(hits)
            new = p[:r + 1] + (y,) + p[i + 1:]
            sup = tuple(range(1, r + 1)) + (i,) + tuple(range(i + 1, n))
        else:
            if not any(j < n - 2 for j in hits):
                return None
            r = min(hits)
            new = p[:r + 1] + (y, p[n])
            sup = tuple(range(1, r + 1)) + (n,)
    else:
        raise PreconditionError(f"direction must be forward or backward, got {direction!r}")
    return Reduction(new, Bridge(new, sup), i, y, direction)


def reduce_elementary(U: Universe, path) -> Tuple[QlPath, List[Reduction]]:
    """Apply the first available elementary reduction until none is left.

    A final round of basic reductions removes chords that the elementary
    thresholds at the endpoints leave alone on very short paths.
    """
    p = as_path(U, path)
    _require_path(U, p)
    if p[0] == p[-1]:
        raise PreconditionError("endpoints coincide")
    trace: List[Reduction] = []
    while True:
        reds = elementary_reductions(U, p)
        if not reds:
            break
        trace.append(reds[0])
        p = reds[0].path
    final, basic = reduce_to_direct(U, p)
    for b in basic:
        trace.append(Reduction(b.indices, Bridge(b.indices, ()), -1, -1, "basic"))
    return final, trace


def elementary_reductions(U: Universe, path) -> List[Reduction]:
    """Every elementary reduction of the path, by exhaustive search over U."""
    p = as_path(U, path)
    out = []
    for i in range(len(p)):
        for y in _sorted(U, U.up[p[i]]):
            for d in ("forward", "backward"):
                red = elementary_reduction(U, p, i, y, d)
                if red is not None:
                    out.append(red)
    return out


def is_bridge(U: Universe, base, bridge_path, support: Sequence[int]) -> bool:
    T = as_path(U, base)
    B = as_path(U, bridge_path)
    n = len(T) - 1
    c = tuple(support)
    m = len(B) - 2
    if m < 0 or len(c) != m or B[0] != T[0] or B[-1] != T[-1]:
        return False
    if not is_path(U, B):
        return False
    if any(not 0 <= x <= n for x in c) or any(a >= b for a, b in zip(c, c[1:])):
        return False
    for r in range(m):
        if not (U.up[T[c[r]]] >> B[r + 1]) & 1:
            return False
    if m >= 2 and c[0] == 0 and c[1] < 2:
        return False
    if m >= 2 and c[-1] == n and c[-2] > n - 2:
        return False
    return True


def find_bridge_support(U: Universe, base, bridge_path) -> Optional[Tuple[int, ...]]:
    """Search a support sequence making ``bridge_path`` a bridge over ``base``."""
    T = as_path(U, base)
    B = as_path(U, bridge_path)
    n, m = len(T) - 1, len(B) - 2
    if m < 0 or B[0] != T[0] or B[-1] != T[-1] or not is_path(U, B):
        return None
    options = [[k for k in range(n + 1) if (U.up[T[k]] >> B[r + 1]) & 1] for r in range(m)]

    def rec(r, lo, acc):
        if r == m:
            cand = tuple(acc)
            return cand if is_bridge(U, T, B, cand) else None
        for k in options[r]:
            if k < lo:
                continue
            got = rec(r + 1, k + 1, acc + [k])
            if got is not None:
                return got
        return None

    return rec(0, 0, [])


def compose_bridges(U: Universe, base, outer: Bridge, inner: Bridge) -> Optional[Tuple[int, ...]]:
    """Support of ``inner`` (a bridge over ``outer.path``) as a bridge over ``base``.

    Tries the composite support first, then falls back to a search.
    """
    T = as_path(U, base)
    n_outer = len(outer.path) - 1
    full = (0,) + tuple(outer.support) + (len(T) - 1,)
    comp = tuple(full[k] if 0 < k < n_outer else (0 if k == 0 else len(T) - 1)
                 for k in inner.support)
    if is_bridge(U, T, inner.path, comp):
        return comp
    return find_bridge_support(U, T, inner.path)


# -- optimality ----------------------------------------------------------------

def widehat_ql(U: Universe, X) -> frozenset:
    return U.members(_widehat_mask(U, U.idx(X)))


def _widehat_mask(U: Universe, i: int) -> int:
    out = 0
    for y in _bits(U.up[i]):
        out |= U.adj[y]
    return out


def _window_ok(U, p, strict_ends: bool) -> bool:
    n = len(p) - 1
    for i in range(n + 1):
        w = _widehat_mask(U, p[i])
        hit = [j for j in range(n + 1) if (w >> p[j]) & 1]
        if i == 0:
            lim = 1 if strict_ends else 2
            if any(j > lim for j in hit):
                return False
        elif i == n:
            lim = n - 1 if strict_ends else n - 2
            if any(j < lim for j in hit):
                return False
        elif any(abs(j - i) > 1 for j in hit):
            return False
    return True


def _require_optimal_pre(p):
    if len(p) - 1 < 3:
        raise PreconditionError("optimality needs a path of length n >= 3")
    if p[0] == p[-1]:
        raise PreconditionError("optimality needs X_0 != X_n")


def is_optimal(U: Universe, path) -> bool:
    """No elementary reduction exists, decided through the widehat windows.

    Interior rays must see only their neighbours; X_0 may see X_1, X_2 and
    X_n may see X_(n-1), X_(n-2), matching the thresholds of the reduction
    procedure.
    """
    p = as_path(U, path)
    _require_path(U, p)
    _require_optimal_pre(p)
    return _window_ok(U, p, strict_ends=False)


def admits_elementary_reduction(U: Universe, path) -> bool:
    p = as_path(U, path)
    for i in range(len(p)):
        for y in _bits(U.up[p[i]]):
            for d in ("forward", "backward"):
                if elementary_reduction(U, p, i, y, d) is not None:
                    return True
    return False


def scholium_window(U: Universe, path) -> bool:
    """The window test with endpoint sets {X_0, X_1} and {X_(n-1), X_n}.

    Stricter than :func:`is_optimal`: it also demands narrow entrance and exit.
    """
    p = as_path(U, path)
    _require_path(U, p)
    _require_optimal_pre(p)
    return _window_ok(U, p, strict_ends=True)


def substitutions_direct(U: Universe, path) -> bool:
    """Every single-position replacement Y in sat(X_i) gives a direct path."""
    p = as_path(U, path)
    _require_path(U, p)
    for i in range(len(p)):
        for y in _bits(U.up[p[i]]):
            q = p[:i] + (y,) + p[i + 1:]
            if not is_direct(U, q):
                return False
    return True


def _direct_extensions(U: Universe, choices: List[int], cap: int):
    """Direct QL-paths (Z_0..Z_n) with Z_j in choices[j], in search order."""
    n = len(choices) - 1
    count = [0]

    def rec(acc):
        count[0] += 1
        if count[0] > cap:
            raise CapExceeded(f"enlargement search exceeded {cap} nodes")
        j = len(acc)
        if j == n + 1:
            if acc[0] != acc[-1]:
                yield tuple(acc)
            return
        cand = choices[j]
        if j:
            cand &= U.adj[acc[-1]]
        for k in range(j - 1):
            cand &= ~U.adj[acc[k]]
        for z in _bits(cand):
            yield from rec(acc + [z])

    yield from rec([])


def direct_enlargement_condition(U: Universe, path, cap: int = 200_000) -> bool:
    """For each i and Y in sat(X_i) some direct enlargement Z has Z_i above Y."""
    p = as_path(U, path)
    _require_path(U, p)
    base = [U.up[x] for x in p]
    for i in range(len(p)):
        for y in _bits(U.up[p[i]]):
            choices = list(base)
            choices[i] = base[i] & U.up[y]
            if next(_direct_extensions(U, choices, cap), None) is None:
                return False
    return True


def enlargements(U: Universe, path, cap: int = 200_000):
    """All enlargements (positionwise upsets forming a QL-path) of the path."""
    p = as_path(U, path)
    count = [0]

    def rec(acc):
        count[0] += 1
        if count[0] > cap:
            raise CapExceeded(f"enlargement enumeration exceeded {cap} nodes")
        j = len(acc)
        if j == len(p):
            yield tuple(acc)
            return
        cand = U.up[p[j]]
        if j:
            cand &= U.adj[acc[-1]]
        for z in _bits(cand):
            yield from rec(acc + [z])

    yield from rec([])


def direct_enlargements_cofinal(U: Universe, path, cap: int = 200_000) -> bool:
    p = as_path(U, path)
    _require_path(U, p)
    for Y in enlargements(U, p, cap):
        choices = [U.up[y] for y in Y]
        if next(_direct_extensions(U, choices, cap), None) is None:
            return False
    return True


def is_enlargement_of(U: Universe, pathY, pathX) -> bool:
    """Positionwise star inclusion QL(X_i) in QL(Y_i)."""
    Y, X = as_path(U, pathY), as_path(U, pathX)
    if len(X) != len(Y):
        raise PreconditionError("paths of different lengths")
    return all((U.up[x] >> y) & 1 for x, y in zip(X, Y))


def dominates(U: Universe, pathY, pathX) -> bool:
    return is_enlargement_of(U, pathY, pathX)


# -- minimal paths -------------------------------------------------------------

def distances(U: Universe, X) -> Dict[int, int]:
    src = U.idx(X)
    dist = {src: 0}
    queue = deque([src])
    while queue:
        a = queue.popleft()
        for b in _bits(U.adj[a] & ~(1 << a)):
            if b not in dist:
                dist[b] = dist[a] + 1
                queue.append(b)
    return dist


def minimal_path(U: Universe, X, Y) -> Optional[QlPath]:
    """A geodesic from X to Y; parents are taken in lexicographic ray order."""
    src, dst = U.idx(X), U.idx(Y)
    parent = {src: None}
    queue = deque([src])
    while queue:
        a = queue.popleft()
        if a == dst:
            break
        for b in _sorted(U, U.adj[a] & ~(1 << a)):
            if b not in parent:
                parent[b] = a
                queue.append(b)
    if dst not in parent:
        return None
    out = [dst]
    while parent[out[-1]] is not None:
        out.append(parent[out[-1]])
    return _wrap(U, out[::-1])


def is_minimal(U: Universe, path) -> bool:
    p = as_path(U, path)
    if not is_path(U, p):
        return False
    return distances(U, p[0]).get(p[-1]) == len(p) - 1


# -- upsets, downsets, twins ---------------------------------------------------

def upset(U: Universe, S: Iterable) -> frozenset:
    out = 0
    for X in S:
        out |= U.up[U.idx(X)]
    return U.members(out)


def downset(U: Universe, S: Iterable) -> frozenset:
    out = 0
    for X in S:
        out |= U.down[U.idx(X)]
    return U.members(out)


def _up_of_down(U: Universe, i: int) -> int:
    out = 0
    for z in _bits(U.down[i]):
        out |= U.up[z]
    return out


@dataclass
class TwinAnnotation:
    twin: List[bool]        # twin[p]: (X_p, X_(p+1)) is a twin pair
    single: List[bool]

    def to_json(self) -> dict:
        return {"twin_pairs": [p for p, t in enumerate(self.twin) if t],
                "singles": [p for p, s in enumerate(self.single) if s]}


def _twins(U, p) -> List[bool]:
    return [bool(U.down[a] & U.down[b]) for a, b in zip(p, p[1:])]


def twins_and_singles(U: Universe, path) -> TwinAnnotation:
    p = as_path(U, path)
    _require_direct(U, p)
    tw = _twins(U, p)
    n = len(p) - 1
    single = [not ((i > 0 and tw[i - 1]) or (i < n and tw[i])) for i in range(n + 1)]
    # an upset meets a direct path in at most two adjacent rays
    pos = {x: k for k, x in enumerate(p)}
    for y in range(len(U)):
        hits = sorted(pos[x] for x in _bits(U.up[y]) if x in pos)
        if len(hits) > 2 or (len(hits) == 2 and hits[1] - hits[0] != 1):
            log.error("upset of %s meets the path at %s", U.label(y), hits)
    return TwinAnnotation(tw, single)


# -- anchors -------------------------------------------------------------------

@dataclass
class AnchorSet:
    anchors: Tuple[int, ...]
    legal: Tuple[int, ...]                   # legal anchor index per position
    illegal: Tuple[Tuple[int, ...], ...]     # illegal anchor indices per position
    twin: Tuple[bool, ...]
    strategy: str = "given"

    @property
    def m(self) -> int:
        return len(self.anchors) - 1

    def bound_holds(self) -> bool:
        """The stated length bound m <= n <= 2m."""
        n = len(self.legal) - 1
        return self.m <= n <= 2 * self.m

    def to_json(self, U: Universe) -> dict:
        return {
            "anchors": [ray_to_json(U.rays[a]) for a in self.anchors],
            "legal": list(self.legal),
            "illegal": [list(x) for x in self.illegal],
            "twin_pairs": [p for p, t in enumerate(self.twin) if t],
            "strategy": self.strategy,
        }


def anchor_pattern(twin: Sequence[bool]) -> Tuple[int, ...]:
    """Legal anchor index per position, as forced by the left-to-right procedure."""
    n = len(twin)
    legal = []
    k = -1
    for i in range(n + 1):
        incoming = i > 0 and twin[i - 1]
        if incoming and not (i >= 2 and twin[i - 2]):
            legal.append(k)
            continue
        k += 1
        legal.append(k)
    return tuple(legal)


def _is_anchor_of(U, p, tw, pos: int, y: int) -> bool:
    """Whether y anchors the ray at ``pos`` in the sense of the anchor definition."""
    n = len(p) - 1
    if not (U.down[p[pos]] >> y) & 1:
        return False
    nbrs = [j for j in (pos - 1, pos + 1) if 0 <= j <= n and tw[min(pos, j)]]
    if not nbrs:
        return True
    return any((U.down[p[j]] >> y) & 1 for j in nbrs)


def anchors_of(U: Universe, path, anchors: Sequence[int], pos: int) -> List[int]:
    p = as_path(U, path)
    tw = _twins(U, p)
    return [k for k, y in enumerate(anchors) if _is_anchor_of(U, p, tw, pos, y)]


def _illegal(U, p, tw, anchors, legal):
    out = []
    for pos in range(len(p)):
        out.append(tuple(k for k, y in enumerate(anchors)
                         if k != legal[pos] and _is_anchor_of(U, p, tw, pos, y)))
    return tuple(out)


def anchor_set(U: Universe, path, strategy: str = "greedy") -> AnchorSet:
    """Left-to-right anchor choice; ``special`` anchors every single at itself."""
    if strategy not in ("greedy", "special"):
        raise PreconditionError(f"unknown anchor strategy {strategy!r}")
    p = as_path(U, path)
    _require_direct(U, p)
    tw = _twins(U, p)
    n = len(p) - 1
    legal = anchor_pattern(tw)
    anchors: List[int] = []
    for i in range(n + 1):
        if legal[i] < len(anchors):
            continue
        incoming = i > 0 and tw[i - 1]
        outgoing = i < n and tw[i]
        if incoming:
            cand = U.down[p[i - 1]] & U.down[p[i]]
        elif outgoing:
            cand = U.down[p[i]] & U.down[p[i + 1]]
        else:
            cand = U.down[p[i]]
        if strategy == "special" and not incoming and not outgoing:
            y = p[i]
        else:
            y = _first(U, cand)
        anchors.append(y)
    S = AnchorSet(tuple(anchors), legal, _illegal(U, p, tw, anchors, legal), tuple(tw), strategy)
    for pos, ill in enumerate(S.illegal):
        if len(ill) > 1 or (ill and ill[0] != legal[pos] + 1):
            log.error("unexpected illegal anchors %s at position %d", ill, pos)
    return S


def is_anchor_set(U: Universe, path, anchors: Sequence) -> bool:
    """Whether ``anchors`` can be the anchor set chosen by the procedure for the path."""
    p = as_path(U, path)
    if not is_direct(U, p):
        return False
    ys = [U.idx(Y) for Y in anchors]
    tw = _twins(U, p)
    legal = anchor_pattern(tw)
    if len(ys) != legal[-1] + 1:
        return False
    for pos in range(len(p)):
        y = ys[legal[pos]]
        if not _is_anchor_of(U, p, tw, pos, y):
            return False
        # a shared anchor must sit below both rays of its pair
        if pos + 1 < len(p) and legal[pos + 1] == legal[pos]:
            if not ((U.down[p[pos]] & U.down[p[pos + 1]]) >> y) & 1:
                return False
    return True


def _as_anchor_set(U, p, S) -> AnchorSet:
    if isinstance(S, AnchorSet):
        return S
    ys = tuple(U.idx(Y) for Y in S)
    if not is_anchor_set(U, p, ys):
        raise PreconditionError("not an anchor set of the path")
    tw = _twins(U, p)
    legal = anchor_pattern(tw)
    return AnchorSet(ys, legal, _illegal(U, p, tw, ys, legal), tuple(tw))


def sql_cover(U: Universe, Y1, Y2) -> Optional[Tuple[int, int]]:
    """A quasilinear pair (X1, X2) with Y1 below X1 and Y2 below X2, if any."""
    a, b = U.idx(Y1), U.idx(Y2)
    ub = U.up[b]
    for x in _sorted(U, U.up[a]):
        hit = U.adj[x] & ub
        if hit:
            return x, _first(U, hit)
    return None


def is_sql_pair(U: Universe, Y1, Y2) -> bool:
    return sql_cover(U, Y1, Y2) is not None


def is_direct_sql_sequence(U: Universe, seq) -> bool:
    """A one-element sequence counts as (vacuously) direct."""
    ys = [U.idx(Y) for Y in seq]
    if not ys:
        return False
    for a, b in zip(ys, ys[1:]):
        if not is_sql_pair(U, a, b):
            return False
    for k in range(len(ys)):
        for l in range(k + 2, len(ys)):
            if U.adjacent(ys[k], ys[l]):
                return False
    return True


# -- flocks and tracks ---------------------------------------------------------

@dataclass
class FlockPartition:
    flocks: List[Tuple[int, int]]       # maximal flocks (p, q)
    isolated: List[int]                 # p for isolated twin pairs (X_p, X_(p+1))
    singles: List[int]
    flock_anchors: List[Tuple[int, ...]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"flocks": [list(f) for f in self.flocks],
                "isolated_twin_pairs": [[p, p + 1] for p in self.isolated],
                "singles": list(self.singles),
                "flock_anchors": [list(a) for a in self.flock_anchors]}


def flocks(U: Universe, path, S=None) -> FlockPartition:
    p = as_path(U, path)
    _require_direct(U, p)
    S = anchor_set(U, p) if S is None else _as_anchor_set(U, p, S)
    tw = _twins(U, p)
    n = len(p) - 1
    runs, i = [], 0
    while i < n:
        if tw[i]:
            j = i
            while j < n and tw[j]:
                j += 1
            runs.append((i, j))
            i = j
        else:
            i += 1
    fl = [(a, b) for a, b in runs if b - a >= 2]
    iso = [a for a, b in runs if b - a == 1]
    covered = set()
    for a, b in runs:
        covered.update(range(a, b + 1))
    singles = [k for k in range(n + 1) if k not in covered]
    if len(covered) + len(singles) != n + 1:
        raise AssertionError("flock partition does not cover the path")
    fa = [tuple(sorted({S.legal[k] for k in range(a, b + 1)})) for a, b in fl]
    return FlockPartition(fl, iso, singles, fa)


@dataclass
class Track:
    start: int     # k
    end: int       # k + t + 1

    @property
    def t(self) -> int:
        return self.end - self.start - 1


def _anchor_ys(U, S) -> List[int]:
    return list(S.anchors) if isinstance(S, AnchorSet) else [U.idx(Y) for Y in S]


def tracks(U: Universe, S) -> List[Track]:
    ys = _anchor_ys(U, S)
    out, i = [], 0
    m = len(ys) - 1
    while i < m:
        if U.up[ys[i]] & U.up[ys[i + 1]]:
            j = i
            while j < m and U.up[ys[j]] & U.up[ys[j + 1]]:
                j += 1
            out.append(Track(i, j))
            i = j
        else:
            i += 1
    return out


def trackless(U: Universe, S) -> List[Tuple[int, int]]:
    """Maximal runs (a, b) of anchor indices that lie in no track."""
    ys = _anchor_ys(U, S)
    inside = set()
    for tr in tracks(U, ys):
        inside.update(range(tr.start, tr.end + 1))
    out, cur = [], None
    for k in range(len(ys)):
        if k in inside:
            if cur is not None:
                out.append(cur)
                cur = None
        else:
            cur = (k, k) if cur is None else (cur[0], k)
    if cur is not None:
        out.append(cur)
    return out


def is_flocky(U: Universe, path, S=None) -> bool:
    p = as_path(U, path)
    _require_direct(U, p)
    S = anchor_set(U, p) if S is None else _as_anchor_set(U, p, S)
    on_path = 0
    for x in p:
        on_path |= 1 << x
    ys = S.anchors
    for k in range(len(ys) - 1):
        both = U.up[ys[k]] & U.up[ys[k + 1]]
        if both and not both & on_path:
            return False
    return True


@dataclass
class FlockModification:
    path: QlPath
    track: Track
    s: int
    r: int
    inserted: Tuple[int, ...]
    flock: Optional[Tuple[int, int]]     # maximal flock of the new path holding the inserted rays
    whole: bool                          # the flock runs from X_s to X_r


def flock_modification(U: Universe, path, S, track: Track,
                       choices: Optional[Sequence] = None) -> FlockModification:
    p = as_path(U, path)
    if not is_minimal(U, p) or p[0] == p[-1]:
        raise PreconditionError("flock modification needs a minimal path")
    S = _as_anchor_set(U, p, S)
    ys = S.anchors
    k, t = track.start, track.t
    if not any(tr.start == k and tr.end == track.end for tr in tracks(U, S)):
        raise PreconditionError("track is not a maximal track of the anchor set")
    pools = [U.up[ys[i]] & U.up[ys[i + 1]] for i in range(k, k + t + 1)]
    if choices is None:
        ws = [_first(U, m) for m in pools]
    else:
        ws = [U.idx(W) for W in choices]
        if len(ws) != t + 1:
            raise PreconditionError(f"need {t + 1} choices, got {len(ws)}")
        for w, m in zip(ws, pools):
            if not (m >> w) & 1:
                raise PreconditionError(f"{U.label(w)} is outside the required upset intersection")
    n = len(p) - 1
    owners = [set([S.legal[q]]) | set(S.illegal[q]) for q in range(n + 1)]
    pair = None
    for s in range(n + 1):
        r = s + t + 2
        if r <= n and k in owners[s] and track.end in owners[r]:
            pair = (s, r)
            break
    if pair is None:
        raise PreconditionError("no positions s, r with the track's end anchors at distance t+2")
    s, r = pair
    new = p[:s + 1] + tuple(ws) + p[r:]
    if not is_path(U, new):
        raise AssertionError("flock modification did not produce a QL-path")
    fl = None
    if is_direct(U, new):
        for a, b in flocks(U, new).flocks:
            if a <= s + 1 and s + t + 1 <= b:
                fl = (a, b)
        if fl is None and t == 0:
            for a in flocks(U, new).isolated:
                if a <= s + 1 <= a + 1:
                    fl = (a, a + 1)
    return FlockModification(_wrap(U, new), track, s, r, tuple(ws), fl,
                             fl == (s, r))


def total_flock_modification(U: Universe, path, S=None
                             ) -> Tuple[QlPath, List[FlockModification], List[Track]]:
    """Modify on every maximal track that admits a length-preserving splice.

    Returns the new path, the applied steps and the skipped tracks. A track is
    skipped when no rays X_s, X_r carrying its end anchors sit t+2 apart,
    which happens when those anchors belong to consecutive singles.
    """
    p = as_path(U, path)
    if not is_minimal(U, p):
        raise PreconditionError("flock modification needs a minimal path")
    S = anchor_set(U, p) if S is None else _as_anchor_set(U, p, S)
    steps, skipped = [], []
    for tr in tracks(U, S):
        try:
            mod = flock_modification(U, p, S.anchors, tr)
        except PreconditionError:
            log.info("track %s has no length-preserving placement", (tr.start, tr.end))
            skipped.append(tr)
            continue
        steps.append(mod)
        p = mod.path.indices
    return _wrap(U, p), steps, skipped


# -- anchor diagrams and blocks ------------------------------------------------

@dataclass
class AnchorDiagram:
    top: List[str]
    bottom: List[str]
    edges: List[Tuple[str, str]]
    arrows: List[Tuple[str, str]]

    def to_json(self) -> dict:
        return {"top": list(self.top), "bottom": list(self.bottom),
                "edges": [list(e) for e in self.edges],
                "arrows": [list(a) for a in self.arrows]}

    @classmethod
    def from_json(cls, data: dict) -> "AnchorDiagram":
        return cls(list(data["top"]), list(data["bottom"]),
                   [tuple(e) for e in data["edges"]], [tuple(a) for a in data["arrows"]])


def anchor_diagram(U: Universe, path, S=None) -> AnchorDiagram:
    """Full decorated subdiagram on the path rays (T0..Tn) and anchors (S0..Sm)."""
    p = as_path(U, path)
    _require_direct(U, p)
    S = anchor_set(U, p) if S is None else _as_anchor_set(U, p, S)
    nodes = [(f"T{i}", x) for i, x in enumerate(p)] + [(f"S{k}", y) for k, y in enumerate(S.anchors)]
    edges, arrows = [], []
    for (na, a), (nb, b) in itertools.combinations(nodes, 2):
        if a == b or not U.adjacent(a, b):
            continue
        sa, sb = U.adj[a], U.adj[b]
        if sa & ~sb == 0:
            arrows.append((na, nb))
        if sb & ~sa == 0:
            arrows.append((nb, na))
        if sa & ~sb and sb & ~sa:
            edges.append((na, nb))
    return AnchorDiagram([U.label(x) for x in p], [U.label(y) for y in S.anchors], edges, arrows)


def diagram_to_dot(D: AnchorDiagram, name: str = "anchors") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    lines.append("  { rank=same; " + " ".join(f"T{i};" for i in range(len(D.top))) + " }")
    lines.append("  { rank=same; " + " ".join(f"S{k};" for k in range(len(D.bottom))) + " }")
    for i, lab in enumerate(D.top):
        lines.append(f'  T{i} [label="{lab}"];')
    for k, lab in enumerate(D.bottom):
        lines.append(f'  S{k} [label="{lab}", shape=box];')
    for a, b in D.edges:
        lines.append(f"  {a} -> {b} [dir=none];")
    for a, b in D.arrows:
        lines.append(f"  {a} -> {b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass
class QlBlock:
    anchors: Tuple[int, int]        # (k, k+t) in S
    positions: Tuple[int, ...]      # rays of T with these legal anchors
    singles: bool


def ql_blocks(U: Universe, path, S=None) -> List[QlBlock]:
    """Maximal QL-runs of length >= 1 in the anchor row, lifted to the path row."""
    p = as_path(U, path)
    _require_direct(U, p)
    S = anchor_set(U, p) if S is None else _as_anchor_set(U, p, S)
    ys = S.anchors
    ann = twins_and_singles(U, p)
    out, k = [], 0
    while k < len(ys):
        j = k
        while j + 1 < len(ys) and U.adjacent(ys[j], ys[j + 1]):
            j += 1
        if j > k:
            pos = tuple(q for q in range(len(p)) if k <= S.legal[q] <= j)
            out.append(QlBlock((k, j), pos, all(ann.single[q] for q in pos)))
        k = j + 1
    return out


# -- entrance and exit ---------------------------------------------------------

@dataclass
class EntranceExit:
    entrance: str
    exit: str
    entrance_witness: Optional[int] = None    # W in X_0 up with X_2 in QL(W)
    exit_witness: Optional[int] = None


def entrance_exit(U: Universe, path) -> EntranceExit:
    p = as_path(U, path)
    if not is_optimal(U, p):
        raise PreconditionError("entrance and exit are defined for optimal paths")
    n = len(p) - 1
    ent = [w for w in _sorted(U, U.up[p[0]]) if U.adjacent(w, p[2])]
    ext = [w for w in _sorted(U, U.up[p[n]]) if U.adjacent(w, p[n - 2])]
    return EntranceExit("wide" if ent else "narrow", "wide" if ext else "narrow",
                        ent[0] if ent else None, ext[0] if ext else None)


def _require_minimal(U, p):
    if not is_minimal(U, p):
        raise PreconditionError("path is not minimal")
    if len(p) - 1 < 3:
        raise PreconditionError("need a path of length n >= 3")


def entrance_modification(U: Universe, path, Y=None) -> Optional[QlPath]:
    """(X_0, Y, X_2, ..., X_n) for Y in (X_0 down) up with X_2 in QL(Y).

    With ``Y`` omitted the first such ray is taken; returns None if none exists.
    """
    p = as_path(U, path)
    _require_minimal(U, p)
    pool = _up_of_down(U, p[0]) & U.adj[p[2]]
    if Y is None:
        y = _first(U, pool)
        if y is None:
            return None
    else:
        y = U.idx(Y)
        if not (pool >> y) & 1:
            raise PreconditionError(f"{U.label(y)} does not qualify for an entrance modification")
    new = (p[0], y) + p[2:]
    if not is_minimal(U, new) or not U.down[p[0]] & U.down[y]:
        raise AssertionError("entrance modification did not give a minimal path with a twin start")
    return _wrap(U, new)


def exit_modification(U: Universe, path, W=None) -> Optional[QlPath]:
    p = as_path(U, path)
    rev = entrance_modification(U, p[::-1], W)
    return None if rev is None else _wrap(U, rev.indices[::-1])


def wide_entrance_modification(U: Universe, path, W, Y, Yp) -> QlPath:
    """(X_0, Y', X_2, ..., X_n) for Y' in the interval [W, Y]."""
    p = as_path(U, path)
    _require_minimal(U, p)
    w, y, yp = U.idx(W), U.idx(Y), U.idx(Yp)
    if not ((U.up[p[0]] >> w) & 1 and U.adjacent(w, p[2])):
        raise PreconditionError("W must lie above X_0 and be quasilinear with X_2")
    if not ((_up_of_down(U, p[0]) >> y) & 1 and U.adjacent(y, p[2])):
        raise PreconditionError("Y must lie in (X_0 down) up and be quasilinear with X_2")
    if not interval_member(U.rays[yp], U.rays[w], U.rays[y]):
        raise PreconditionError(f"{U.label(yp)} is not in the interval [W, Y]")
    new = (p[0], yp) + p[2:]
    if not is_minimal(U, new):
        raise AssertionError("interval modification is not minimal")
    return _wrap(U, new)


# -- domination ----------------------------------------------------------------

@dataclass
class DominationReport:
    ok: bool
    checks: Dict[str, bool]
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": dict(self.checks), "notes": list(self.notes)}


def check_domination_theorems(U: Universe, pathX, pathY) -> DominationReport:
    X, Y = as_path(U, pathX), as_path(U, pathY)
    if len(X) != len(Y):
        return DominationReport(False, {"dominates": False}, ["paths of different lengths"])
    if not (is_path(U, X) and is_path(U, Y)):
        return DominationReport(False, {"dominates": False}, ["input is not a pair of QL-paths"])
    if not dominates(U, Y, X):
        bad = [i for i, (x, y) in enumerate(zip(X, Y)) if not (U.up[x] >> y) & 1]
        return DominationReport(False, {"dominates": False},
                                [f"QL(X_{i}) is not inside QL(Y_{i})" for i in bad])
    checks: Dict[str, bool] = {"dominates": True}
    notes: List[str] = []
    minY, minX = is_minimal(U, Y), is_minimal(U, X)
    checks["minimality transfers"] = (not minY) or minX
    n = len(X) - 1
    if minX and n >= 2:
        checks["inner dominator minimal"] = is_minimal(U, Y[1:n])
    if minX and minY and X[0] != X[-1]:
        S = anchor_set(U, X)
        checks["anchor set carries over"] = is_anchor_set(U, Y, S.anchors)
        tx, ty = _twins(U, X), _twins(U, Y)
        checks["twin pairs correspond"] = tx == ty
        ax, ay = twins_and_singles(U, X), twins_and_singles(U, Y)
        checks["singles correspond"] = ax.single == ay.single
        if checks["anchor set carries over"]:
            SY = _as_anchor_set(U, Y, S.anchors)
            checks["legal and illegal anchors agree"] = (S.legal == SY.legal and S.illegal == SY.illegal)
            fx, fy = flocks(U, X, S), flocks(U, Y, SY)
            checks["flocks correspond"] = fx.flocks == fy.flocks
            checks["isolated pairs correspond"] = fx.isolated == fy.isolated
            checks["flocky status agrees"] = is_flocky(U, X, S) == is_flocky(U, Y, SY)
    else:
        notes.append("anchor checks need both paths minimal with distinct endpoints")
    return DominationReport(all(checks.values()), checks, notes)
