"""Exact minimum-weight feedback vertex set for small tournaments."""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from ..errors import SizeLimitError
from ..tournament import FvsSolution, WeightedTournament, iter_bits, mask_is_acyclic, verify_fvs

EXACT_MAX_N = 24


def exact_fvs(wt: WeightedTournament) -> FvsSolution:
    """Minimum-weight FVS via its complement, a maximum-weight transitive subtournament.

    A transitive subtournament has a unique source v, and everything else in
    it lies in v's out-neighbourhood, so

        best(S) = max over v in S of  w(v) + best(S & out(v))

    with ``best(S) = w(S)`` once S is already acyclic.  States are memoised
    on S; for tournaments the number of distinct S reached stays small.
    """
    t = wt.t
    if t.n > EXACT_MAX_N:
        raise SizeLimitError(f"exact_fvs supports n <= {EXACT_MAX_N}, got {t.n}")
    scale = lcm(*(x.denominator for x in wt.w)) if t.n else 1
    w = [int(x * scale) for x in wt.w]
    out = t.out
    memo: dict[int, tuple[int, int]] = {}

    def best(s: int) -> tuple[int, int]:
        hit = memo.get(s)
        if hit is not None:
            return hit
        if mask_is_acyclic(t, s):
            res = (sum(w[v] for v in iter_bits(s)), s)
        else:
            res = (-1, 0)
            for v in iter_bits(s):
                val, keep = best(s & out[v])
                val += w[v]
                if val > res[0]:
                    res = (val, keep | 1 << v)
        memo[s] = res
        return res

    _, keep = best(t.all_mask)
    chosen = [v for v in range(t.n) if not keep >> v & 1]
    sol = verify_fvs(wt, chosen)
    assert isinstance(sol, FvsSolution)
    return sol


def exact_weight(wt: WeightedTournament) -> Fraction:
    return exact_fvs(wt).weight
