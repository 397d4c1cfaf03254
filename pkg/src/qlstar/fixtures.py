"""Built-in forms used by the tests, the CLI and the documentation."""
from __future__ import annotations

import random
from typing import Iterable, List, Optional, Tuple

from .qform import GramForm
from .rayspace import Ray, make_ray
from .tscalar import DENSE, DISCRETE

__all__ = ["fixture_form", "basis_rays", "fixture_universe", "twin_universe",
           "chain_form", "graph_form", "band_universe", "FIXTURES"]

FIXTURES = ("A", "B", "C", "D")


def chain_form(n: int = 5, near: str = "t:0", far: str = "t:5", width: int = 1) -> GramForm:
    """Dense band form: q(e_i) = t:0, b_ij = near for |i-j| <= width, far beyond."""
    cross = []
    for i in range(n):
        for j in range(i + 1, n):
            cross.append((i, j, near if j - i <= width else far))
    return GramForm(["t:0"] * n, cross, "balanced", DENSE)


def fixture_form(name: str) -> GramForm:
    name = name.upper()
    if name == "A":
        # three mutually excessive rays, all quasilinear with the fourth
        cross = [(0, 1, "t:1"), (0, 2, "t:1"), (1, 2, "t:1")]
        return GramForm(["t:0"] * 4, cross, "balanced", DENSE)
    if name == "B":
        cross = [(0, 1, "t:1"), (0, 2, "t:1"), (1, 2, "t:1")]
        return GramForm(["g:0"] * 3, cross, "balanced", DISCRETE)
    if name == "C":
        cross = [(0, 2, "t:1"), (1, 2, "t:0")]
        return GramForm(["g:0", "t:0", "t:1"], cross, "balanced", DISCRETE)
    if name == "D":
        return chain_form(5)
    raise KeyError(f"unknown fixture {name!r}")


def basis_rays(n: int) -> List[Ray]:
    return [make_ray([0 if k == i else None for k in range(n)]) for i in range(n)]


def fixture_universe(name: str):
    from .qlcore import build_universe
    f = fixture_form(name)
    return build_universe(f, basis_rays(f.n))


def twin_universe():
    """Fixture D basis plus ray(e2 + e3)."""
    from .qlcore import build_universe
    f = fixture_form("D")
    extra = make_ray([None, 0, 0, None, None])
    return build_universe(f, basis_rays(5) + [extra])


def graph_form(n: int, edges: Iterable[Tuple[int, int]], near: str = "t:0",
               far: str = "t:5") -> GramForm:
    """Dense form whose basis rays realize the given graph (0-based edges)."""
    es = {(min(a, b), max(a, b)) for a, b in edges}
    cross = [(i, j, near if (i, j) in es else far) for i in range(n) for j in range(i + 1, n)]
    return GramForm(["t:0"] * n, cross, "balanced", DENSE)


def band_universe(n: int = 8, width: int = 1, overlaps: int = 6,
                  seed: Optional[int] = 0, offsets=(0, 0, -1, 1)):
    """Chain form basis plus random short overlap rays spanning 2 or 3 coordinates.

    Overlap rays sit between neighbouring basis rays in the QL-order and are
    what produce twin pairs, flocks and tracks on minimal paths.
    """
    from .qlcore import build_universe
    rng = random.Random(seed)
    f = chain_form(n, width=width)
    gens = basis_rays(n)
    for _ in range(overlaps):
        i = rng.randrange(n - 1)
        k = rng.choice((2, 2, 3))
        prof: List[Optional[int]] = [None] * n
        for j in range(i, min(n, i + k)):
            prof[j] = rng.choice(offsets)
        gens.append(make_ray(prof))
    return build_universe(f, gens)
