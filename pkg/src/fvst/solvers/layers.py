"""Layering algorithm for light tournaments.

The vertex set is peeled into layers by an in-BFS towards a root.  Each
layer ``i`` is split into ``U_i`` and ``S_i`` and gets a local solution
``F_i`` (an FVS of the layer).  Finally one parity class of layers is
deleted wholesale and the local solutions of the other class are added.

Two kinds of step:

* BFS step: the unseen in-neighbours of the root layer ``U_i`` are covered
  by two vertices ``z, z'`` of ``U_i``; the heavier side ``N(z)`` becomes
  ``U_{i+1}`` and the rest ``S_{i+1}`` is the local solution.
* fresh start: when no unseen vertex points into ``U_i``, restart from an
  unseen vertex with fewest unseen in-neighbours; its in-neighbourhood is
  T5-free, so the local solution is computed exactly by :func:`cdz`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

from ..errors import InvariantError, PreconditionError
from ..lp import DEFAULT_TOL, Tolerances
from ..structure import find_2_in_dominating_pair, first_heavy_triangle, in_neighborhood_mask
from ..tournament import (
    FvsSolution,
    WeightedTournament,
    iter_bits,
    to_mask,
    triangles,
    verify_fvs,
)
from .cdz import cdz

FRESH_ROOT = "fresh_root"
FRESH_LAYER = "fresh_layer"
BFS_LAYER = "bfs_layer"


@dataclass(frozen=True)
class LayerEntry:
    index: int
    kind: str
    U: frozenset[int]
    S: frozenset[int]
    F: frozenset[int]
    dominators: tuple[int, int] | None = None


@dataclass
class LayeringTrace:
    entries: list[LayerEntry] = field(default_factory=list)
    L0: frozenset[int] = frozenset()
    L1: frozenset[int] = frozenset()
    kept_parity: int | None = None  # parity whose layers keep all but F_i

    def layer_of(self) -> dict[int, int]:
        where = {}
        for e in self.entries:
            for v in e.U | e.S:
                where[v] = e.index
        return where

    def relabel(self, mapping: dict[int, int]) -> "LayeringTrace":
        def m(s):
            return frozenset(mapping[v] for v in s)

        return LayeringTrace(
            [
                replace(
                    e,
                    U=m(e.U),
                    S=m(e.S),
                    F=m(e.F),
                    dominators=None if e.dominators is None else (mapping[e.dominators[0]], mapping[e.dominators[1]]),
                )
                for e in self.entries
            ],
            m(self.L0),
            m(self.L1),
            self.kept_parity,
        )

    def to_dict(self) -> dict:
        return {
            "entries": [
                {
                    "index": e.index,
                    "kind": e.kind,
                    "U": sorted(e.U),
                    "S": sorted(e.S),
                    "F": sorted(e.F),
                    "dominators": list(e.dominators) if e.dominators else None,
                }
                for e in self.entries
            ],
            "L0": sorted(self.L0),
            "L1": sorted(self.L1),
            "kept_parity": self.kept_parity,
        }


def _fs(mask: int) -> frozenset[int]:
    return frozenset(iter_bits(mask))


def layers(wt: WeightedTournament, tol: Tolerances = DEFAULT_TOL, check: bool = True,
           stats: dict | None = None) -> tuple[FvsSolution, LayeringTrace]:
    """FVS of a light tournament of weight at most 3/4 of the total weight."""
    t = wt.t
    if check:
        heavy = first_heavy_triangle(t)
        if heavy is not None:
            raise PreconditionError(f"input is not light: triangle {tuple(heavy)} is heavy", witness=heavy)
    trace = LayeringTrace()
    W = t.all_mask
    root = 0  # U_i as a mask; U_0 is empty
    i = 0
    while W:
        targets = in_neighborhood_mask(t, root, W)
        if targets:
            pair = find_2_in_dominating_pair(t, iter_bits(root), iter_bits(targets), wt.w)
            if pair is None:
                raise InvariantError(
                    f"no 2-in-dominating pair in layer {i}; the input is light, so such a pair must exist",
                    {"instance": t.bitstring(), "weights": [str(x) for x in wt.w], "layer": sorted(iter_bits(root)),
                     "targets": sorted(iter_bits(targets)), "trace": trace.to_dict()},
                )
            z, z2 = pair
            u_next = t.inn[z] & W
            s_next = t.inn[z2] & W & ~u_next
            W &= ~(u_next | s_next)
            i += 1
            trace.entries.append(LayerEntry(i, BFS_LAYER, _fs(u_next), _fs(s_next), _fs(s_next), (z, z2)))
            root = u_next
        else:
            z = min(iter_bits(W), key=lambda v: ((t.inn[v] & W).bit_count(), v))
            u_next = t.inn[z] & W
            sub, idx = wt.induced(iter_bits(u_next))
            try:
                local = cdz(sub, tol, check=check, stats=stats)
            except PreconditionError as exc:
                raise InvariantError(
                    f"fresh-start layer of root {z} is not T5-free: {exc}",
                    {"instance": t.bitstring(), "weights": [str(x) for x in wt.w], "root": z, "trace": trace.to_dict()},
                ) from exc
            back = {new: old for old, new in idx.items()}
            f_local = frozenset(back[v] for v in local.chosen)
            trace.entries.append(LayerEntry(i + 1, FRESH_ROOT, frozenset([z]), frozenset(), frozenset()))
            trace.entries.append(LayerEntry(i + 2, FRESH_LAYER, _fs(u_next), frozenset(), f_local))
            W &= ~(1 << z | u_next)
            i += 2
            root = u_next

    L = [frozenset(), frozenset()]
    Fpar: list[frozenset[int]] = [frozenset(), frozenset()]
    for e in trace.entries:
        L[e.index % 2] |= e.U | e.S
        Fpar[e.index % 2] |= e.F
    trace.L0, trace.L1 = L
    if wt.weight(L[0]) >= wt.weight(L[1]):
        trace.kept_parity = 0
        chosen = Fpar[0] | L[1]
    else:
        trace.kept_parity = 1
        chosen = Fpar[1] | L[0]
    res = verify_fvs(wt, chosen)
    if not isinstance(res, FvsSolution):
        raise InvariantError(
            f"layering output misses triangle {tuple(res.triangle)}",
            {"instance": t.bitstring(), "weights": [str(x) for x in wt.w], "trace": trace.to_dict()},
        )
    return res, trace


def check_layering_trace(wt: WeightedTournament, trace: LayeringTrace, chosen=None) -> list[str]:
    """Every structural and weight property the trace must satisfy; returns the failures."""
    t = wt.t
    problems = []
    seen: set[int] = set()
    for e in trace.entries:
        layer = e.U | e.S
        if e.U & e.S or layer & seen:
            problems.append(f"layer {e.index} overlaps earlier layers")
        seen |= layer
        if not e.F <= layer:
            problems.append(f"F_{e.index} is not inside its layer")
        if e.kind == BFS_LAYER and e.F != e.S:
            problems.append(f"bfs layer {e.index} has F != S")
        if e.kind == FRESH_ROOT and (e.S or e.F or len(e.U) != 1):
            problems.append(f"fresh root {e.index} is malformed")
        rest = to_mask(layer - e.F)
        if any(to_mask(tri) & rest == to_mask(tri) for tri in triangles(t) if set(tri) <= layer):
            problems.append(f"F_{e.index} is not an FVS of its layer")
        if e.kind == BFS_LAYER:
            for part, name in ((e.U, "U"), (e.S, "S")):
                if any(set(tri) <= part for tri in triangles(t)):
                    problems.append(f"{name}_{e.index} contains a triangle")
            if wt.weight(e.S) > wt.weight(e.U):
                problems.append(f"w(S_{e.index}) > w(U_{e.index})")
        if e.kind == FRESH_LAYER and 3 * wt.weight(e.F) > wt.weight(e.U):
            problems.append(f"fresh layer {e.index}: w(F) > w(U)/3")
    if seen != set(range(t.n)):
        problems.append("layers do not cover the vertex set")
    s_all = frozenset().union(*(e.S for e in trace.entries))
    problems += [msg for tri, msg in span_findings(wt, trace) if not set(tri) & s_all]
    if chosen is not None and 4 * wt.weight(chosen) > 3 * wt.total():
        problems.append("output weight exceeds 3/4 of the total")
    return problems


def span_findings(wt: WeightedTournament, trace: LayeringTrace) -> list[tuple[tuple[int, int, int], str]]:
    """Triangles not contained in three consecutive layers.

    Such triangles do occur, but in every run seen so far each one passes
    through some bfs ``S_i``; those vertices are always deleted, so the
    output stays feasible.  :func:`check_layering_trace` only flags the ones
    that avoid every ``S_i``.
    """
    where = trace.layer_of()
    out = []
    for tri in triangles(wt.t):
        idx = sorted(where[v] for v in tri)
        if idx[-1] - idx[0] > 2:
            out.append((tuple(tri), f"triangle {tuple(tri)} spans layers {idx}"))
        elif idx[-1] - idx[0] == 2 and idx[1] != idx[0] + 1:
            out.append((tuple(tri), f"triangle {tuple(tri)} skips the middle layer: {idx}"))
    return out


def layer_weight_bound(wt: WeightedTournament, trace: LayeringTrace) -> Fraction:
    """w(V) - (w(kept class) - w(its local solutions)); equals the output weight."""
    keep = trace.L0 if trace.kept_parity == 0 else trace.L1
    local = frozenset().union(*(e.F for e in trace.entries if e.index % 2 == trace.kept_parity))
    return wt.total() - (wt.weight(keep) - wt.weight(local))
