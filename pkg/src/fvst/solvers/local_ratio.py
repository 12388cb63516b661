from __future__ import annotations

from ..tournament import FvsSolution, WeightedTournament, first_triangle, mask_is_acyclic, verify_fvs


def local_ratio_3approx(wt: WeightedTournament) -> FvsSolution:
    """Weighted local-ratio 3-approximation with reverse deletion.

    While some triangle has all three residual weights positive, subtract its
    smallest residual weight from each of its vertices; vertices are
    collected in the order their residual weight hits zero.  Collected
    vertices that are not needed to keep the remainder acyclic are then
    dropped, last collected first.
    """
    t = wt.t
    residual = list(wt.w)
    collected = [v for v in range(t.n) if residual[v] == 0]
    alive = t.all_mask
    for v in collected:
        alive &= ~(1 << v)
    while True:
        tri = first_triangle(t, alive)
        if tri is None:
            break
        delta = min(residual[v] for v in tri)
        for v in tri:
            residual[v] -= delta
            if residual[v] == 0:
                collected.append(v)
                alive &= ~(1 << v)
    chosen = set(collected)
    keep = t.all_mask
    for v in chosen:
        keep &= ~(1 << v)
    for v in reversed(collected):
        if mask_is_acyclic(t, keep | 1 << v):
            chosen.discard(v)
            keep |= 1 << v
    sol = verify_fvs(wt, chosen)
    assert isinstance(sol, FvsSolution)
    return sol
