"""Seeded instance families used by the experiments and the test suites."""

from __future__ import annotations

import random
from fractions import Fraction

from .structure import is_light, is_t5_free
from .tournament import Tournament, WeightedTournament, pair_index, random_tournament


def random_weights(n: int, seed: int, kind: str = "unit", k: int = 10) -> tuple[Fraction, ...]:
    """``unit`` weights, or integers drawn uniformly from 1..k (``uniform-int``)."""
    if kind == "unit":
        return (Fraction(1),) * n
    if kind == "uniform-int":
        rng = random.Random(seed)
        return tuple(Fraction(rng.randint(1, k)) for _ in range(n))
    raise ValueError(f"unknown weight kind {kind!r}")


def weighted(t: Tournament, seed: int, kind: str = "unit", k: int = 10) -> WeightedTournament:
    return WeightedTournament(t, random_weights(t.n, seed ^ 0x5EED, kind, k))


def near_transitive(n: int, flips: int, seed: int) -> Tournament:
    """Transitive tournament under a random vertex order with ``flips`` random arcs reversed."""
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    rank = {v: i for i, v in enumerate(order)}
    bits = 0
    for a in range(n):
        for b in range(a + 1, n):
            if rank[a] < rank[b]:
                bits |= 1 << pair_index(n, a, b)
    m = n * (n - 1) // 2
    if m:
        for k in rng.sample(range(m), min(flips, m)):
            bits ^= 1 << k
    return Tournament(n, bits)


def _grow(n: int, seed: int, accept, attempts: int) -> Tournament:
    """Add vertices one at a time with random arcs, keeping only extensions ``accept`` likes.

    If no random pattern is accepted the new vertex becomes a source, which
    creates no triangle and so preserves both lightness and T5-freeness.
    """
    rng = random.Random(seed)
    outs: list[int] = []
    for new in range(n):
        for _ in range(attempts):
            pattern = rng.getrandbits(new) if new else 0
            cand = _extend(outs, pattern)
            if accept(Tournament.from_out_masks(cand)):
                outs = cand
                break
        else:
            outs = _extend(outs, (1 << new) - 1)
    return Tournament.from_out_masks(outs)


def _extend(outs: list[int], pattern: int) -> list[int]:
    new = len(outs)
    res = list(outs) + [0]
    for v in range(new):
        if pattern >> v & 1:
            res[new] |= 1 << v
        else:
            res[v] |= 1 << new
    return res


def random_light(n: int, seed: int, attempts: int = 40) -> Tournament:
    """Random light tournament grown by rejection; vertex ids are shuffled afterwards."""
    t = _grow(n, seed, is_light, attempts)
    return _shuffle(t, seed)


def random_t5_free(n: int, seed: int, attempts: int = 40) -> Tournament:
    t = _grow(n, seed, lambda s: is_t5_free(s) is None, attempts)
    return _shuffle(t, seed)


def _shuffle(t: Tournament, seed: int) -> Tournament:
    from .tournament import relabel

    perm = list(range(t.n))
    random.Random(seed * 7919 + 1).shuffle(perm)
    return relabel(t, perm)


def seeded_random(n: int, seed: int) -> Tournament:
    return random_tournament(n, seed)


# light 5-vertex tournament with minimum FVS 2; vertex 0 beats 1 here, the
# opposite orientation of that pair gives the same shape
_BLOCK_ARCS = ((4, 0), (4, 2), (3, 4), (1, 4), (2, 0), (2, 1), (3, 2), (0, 3), (1, 3), (0, 1))


def block_chain(blocks: int, seed: int, flips: int = 3, attempts: int = 20) -> Tournament:
    """Copies of a light 5-vertex T5 block ordered transitively, plus random reversed cross arcs.

    Each cross-arc reversal is kept only if the tournament stays light.  The
    basic LP of such instances has fractional optima, which is what drives
    the rounding loop into its layering phase.
    """
    rng = random.Random(seed)
    n = 5 * blocks
    bits = 0
    for a in range(n):
        for b in range(a + 1, n):
            if a // 5 != b // 5:
                bits |= 1 << pair_index(n, a, b)
    for k in range(blocks):
        base = 5 * k
        for u, v in _BLOCK_ARCS:
            a, b = base + u, base + v
            if (u, v) == (0, 1) and rng.random() < 0.5:
                a, b = b, a
            if a < b:
                bits |= 1 << pair_index(n, a, b)
    t = Tournament(n, bits)
    cross = [(a, b) for a in range(n) for b in range(a + 1, n) if a // 5 != b // 5]
    done = 0
    for _ in range(attempts):
        if done >= flips or not cross:
            break
        a, b = rng.choice(cross)
        cand = Tournament(n, t.bits ^ 1 << pair_index(n, a, b))
        if is_light(cand):
            t = cand
            done += 1
    return _shuffle(t, seed)
