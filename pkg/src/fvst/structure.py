"""Structural predicates on tournaments: diagonals, heavy/light, BFS layers,
2-in-domination, T5-freeness, and the small-family censuses.

Neighbourhood helpers take an explicit ``universe`` because the layering
algorithm always works inside the set of still-unseen vertices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from itertools import combinations
from typing import Iterable, Sequence

from .errors import SizeLimitError
from .tournament import (
    Tournament,
    Triangle,
    canonical_form,
    first_triangle,
    from_canonical,
    iter_bits,
    to_mask,
    triangles,
)

MIN_FVS_MAX_N = 16
FAMILY_MAX_K = 7


@dataclass(frozen=True)
class DiagonalReport:
    pair: tuple[int, int]
    witnesses: tuple[int, int]


@dataclass
class FamilyCensus:
    order: int
    fvs_size: int
    members: list[bytes] = field(default_factory=list)
    light: list[bool] = field(default_factory=list)

    @property
    def heavy_count(self) -> int:
        return sum(not x for x in self.light)

    @property
    def light_count(self) -> int:
        return sum(self.light)

    def to_json(self) -> str:
        doc = {
            "order": self.order,
            "fvs_size": self.fvs_size,
            "members": [{"form": m.hex(), "light": lt} for m, lt in zip(self.members, self.light)],
            "count": len(self.members),
            "heavy_count": self.heavy_count,
            "light_count": self.light_count,
        }
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "FamilyCensus":
        doc = json.loads(text)
        census = cls(
            doc["order"],
            doc["fvs_size"],
            [bytes.fromhex(m["form"]) for m in doc["members"]],
            [bool(m["light"]) for m in doc["members"]],
        )
        if len(set(census.members)) != len(census.members):
            raise ValueError("census has duplicate members")
        if (census.heavy_count, census.light_count) != (doc["heavy_count"], doc["light_count"]):
            raise ValueError("census counts do not match its members")
        return census


def _triangle_completers(t: Tournament, u: int, v: int) -> int:
    """Mask of vertices x with {u, v, x} a directed triangle."""
    if t.arc(u, v):
        return t.out[v] & t.inn[u]
    return t.out[u] & t.inn[v]


def is_diagonal(t: Tournament, a: int, b: int) -> DiagonalReport | None:
    """First witness pair {u, v} (lexicographic) making both uva and uvb triangles."""
    if a == b:
        raise ValueError("a diagonal needs two distinct vertices")
    need = 1 << a | 1 << b
    for u, v in combinations(range(t.n), 2):
        if u in (a, b) or v in (a, b):
            continue
        if _triangle_completers(t, u, v) & need == need:
            return DiagonalReport((min(a, b), max(a, b)), (u, v))
    return None


def diagonal_pairs(t: Tournament) -> set[tuple[int, int]]:
    """Every diagonal as a sorted pair."""
    diag = set()
    for u, v in combinations(range(t.n), 2):
        members = list(iter_bits(_triangle_completers(t, u, v)))
        diag.update(combinations(members, 2))
    return diag


def heavy_triangles(t: Tournament) -> list[tuple[Triangle, list[tuple[int, int]]]]:
    """Triangles with at least two diagonal pairs, with those pairs listed."""
    diag = diagonal_pairs(t)
    found = []
    for tri in triangles(t):
        a, b, c = sorted(tri)
        ds = [p for p in ((a, b), (a, c), (b, c)) if p in diag]
        if len(ds) >= 2:
            found.append((tri, ds))
    return found


def first_heavy_triangle(t: Tournament) -> Triangle | None:
    diag = diagonal_pairs(t)
    for tri in triangles(t):
        a, b, c = sorted(tri)
        if ((a, b) in diag) + ((a, c) in diag) + ((b, c) in diag) >= 2:
            return tri
    return None


def is_light(t: Tournament) -> bool:
    return first_heavy_triangle(t) is None


def in_neighborhood_mask(t: Tournament, s: int, universe: int) -> int:
    """Mask form of :func:`in_neighborhood`."""
    found = 0
    for u in iter_bits(s):
        found |= t.inn[u]
    return found & universe & ~s


def in_neighborhood(t: Tournament, s: Iterable[int], universe: Iterable[int]) -> frozenset[int]:
    """Vertices of ``universe`` outside ``s`` with an arc into ``s``."""
    return frozenset(iter_bits(in_neighborhood_mask(t, to_mask(s), to_mask(universe))))


def bfs_layers(t: Tournament, z: int, universe: Iterable[int] | None = None) -> list[frozenset[int]]:
    """Layers V_1(z)={z}, V_2(z), ... of vertices by distance *to* ``z`` inside ``universe``."""
    uni = t.all_mask if universe is None else to_mask(universe)
    if not uni >> z & 1:
        raise ValueError(f"root {z} is not in the universe")
    layers = [1 << z]
    seen = 1 << z
    while True:
        nxt = in_neighborhood_mask(t, seen, uni)
        if not nxt:
            break
        layers.append(nxt)
        seen |= nxt
    return [frozenset(iter_bits(m)) for m in layers]


def find_2_in_dominating_pair(
    t: Tournament,
    candidates: Iterable[int],
    targets: Iterable[int],
    w: Sequence[Fraction] | None = None,
) -> tuple[int, int] | None:
    """A pair (z, z') from ``candidates`` such that every target has an arc to z or z'.

    The first dominating unordered pair in lexicographic order (``z <= z'``,
    so singletons are pairs with themselves) is taken.  It is then oriented
    so that the targets pointing into ``z`` weigh at least as much as those
    pointing into ``z'``; on a tie the smaller id comes first.
    """
    cands = sorted(set(candidates))
    tmask = to_mask(targets)
    if not cands:
        return None
    if not tmask:
        return cands[0], cands[0]
    hits = {c: t.inn[c] & tmask for c in cands}
    for i, z in enumerate(cands):
        for z2 in cands[i:]:
            if hits[z] | hits[z2] == tmask:
                if z == z2 or w is None:
                    return z, z2
                wz = sum((w[v] for v in iter_bits(hits[z])), Fraction(0))
                wz2 = sum((w[v] for v in iter_bits(hits[z2])), Fraction(0))
                return (z2, z) if wz2 > wz else (z, z2)
    return None


def _pattern_code(t: Tournament, verts: Sequence[int]) -> int:
    out = t.out
    code = 0
    k = 0
    for i in range(len(verts)):
        row = out[verts[i]]
        for j in range(i + 1, len(verts)):
            if row >> verts[j] & 1:
                code |= 1 << k
            k += 1
    return code


@lru_cache(maxsize=None)
def _t5_table() -> tuple[bool, ...]:
    """For every labelled 5-vertex orientation (10-bit code), whether it is in T5."""
    forms = set(load_census(5, 2).members)
    return tuple(canonical_form(Tournament(5, code)) in forms for code in range(1 << 10))


def is_t5_free(t: Tournament) -> tuple[int, ...] | None:
    """None if no 5 vertices induce a member of T5, else the first such 5-set."""
    if t.n < 5:
        return None
    table = _t5_table()
    # a T5 member has every vertex on a triangle
    on_triangle = 0
    for tri in triangles(t):
        on_triangle |= to_mask(tri)
    verts = list(iter_bits(on_triangle))
    for five in combinations(verts, 5):
        if table[_pattern_code(t, five)]:
            return five
    return None


def min_fvs_size(t: Tournament) -> int:
    """Minimum number of vertices whose removal leaves ``t`` acyclic.

    Branches three ways on the first surviving triangle, with iterative
    deepening on the budget.
    """
    if t.n > MIN_FVS_MAX_N:
        raise SizeLimitError(f"min_fvs_size supports n <= {MIN_FVS_MAX_N}, got {t.n}")

    def coverable(mask: int, budget: int) -> bool:
        tri = first_triangle(t, mask)
        if tri is None:
            return True
        if budget == 0:
            return False
        return any(coverable(mask & ~(1 << v), budget - 1) for v in tri)

    k = 0
    while not coverable(t.all_mask, k):
        k += 1
    return k


def _all_classes(k: int) -> list[bytes]:
    """Canonical forms of every k-vertex tournament, grown one vertex at a time."""
    level = [canonical_form(Tournament(0))]
    for size in range(1, k + 1):
        found = set()
        for form in level:
            base = from_canonical(form)
            for pattern in range(1 << (size - 1)):
                outs = list(base.out) + [0]
                new = size - 1
                for v in range(new):
                    if pattern >> v & 1:
                        outs[new] |= 1 << v
                    else:
                        outs[v] |= 1 << new
                found.add(canonical_form(Tournament.from_out_masks(outs)))
        level = sorted(found)
    return level


def enumerate_family(k: int, f: int) -> FamilyCensus:
    """All k-vertex tournaments (up to isomorphism) whose minimum FVS has size at least ``f``.

    "At least" matters only for k=7, f=3: exactly one 7-vertex tournament
    (the quadratic-residue tournament) needs four vertices, and it belongs
    with the others since every member must carry the constraint sum >= f.
    k <= 5 enumerates every labelled tournament; larger k extends the
    canonical representatives of size k-1 by one vertex in all 2^(k-1) ways.
    """
    if k > FAMILY_MAX_K:
        raise SizeLimitError(f"enumerate_family supports k <= {FAMILY_MAX_K}, got {k}")
    if k <= 5:
        forms = sorted({canonical_form(Tournament(k, b)) for b in range(1 << (k * (k - 1) // 2))})
    else:
        forms = _all_classes(k)
    census = FamilyCensus(k, f)
    for form in forms:
        t = from_canonical(form)
        if min_fvs_size(t) >= f:
            census.members.append(form)
            census.light.append(is_light(t))
    return census


@lru_cache(maxsize=None)
def load_census(k: int, f: int) -> FamilyCensus:
    """Shipped census file if present, otherwise a fresh enumeration."""
    name = f"census_{k}_{f}.json"
    try:
        text = resources.files("fvst.data").joinpath(name).read_text()
    except FileNotFoundError:
        return enumerate_family(k, f)
    return FamilyCensus.from_json(text)


def count_triangles_by_degrees(t: Tournament) -> int:
    """C(n,3) minus the transitive triples counted at their sources."""
    n = t.n
    return n * (n - 1) * (n - 2) // 6 - sum(d * (d - 1) // 2 for d in t.out_degrees())


__all__ = [
    "DiagonalReport",
    "FamilyCensus",
    "bfs_layers",
    "count_triangles_by_degrees",
    "diagonal_pairs",
    "enumerate_family",
    "find_2_in_dominating_pair",
    "first_heavy_triangle",
    "heavy_triangles",
    "in_neighborhood",
    "in_neighborhood_mask",
    "is_diagonal",
    "is_light",
    "is_t5_free",
    "load_census",
    "min_fvs_size",
]
