"""Tournament representation and the basic operations everything else builds on.

A tournament on ``n`` vertices stores one orientation bit per unordered pair
``{u, v}`` with ``u < v`` (bit set means ``u -> v``), in the flat order
``(0,1), (0,2), ..., (n-2, n-1)``.  Alongside it we keep per-vertex out- and
in-neighbourhood bitsets as Python ints, so neighbourhood algebra is a handful
of ``&``/``|`` operations.  Python ints are unbounded, so there is no hard
64-vertex cap; the LP side caps instance sizes long before bitsets matter.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

from .errors import SizeLimitError, ValidationError

CANONICAL_MAX_N = 12


def pair_index(n: int, a: int, b: int) -> int:
    """Position of the unordered pair ``{a, b}`` in the flat pair order."""
    if a > b:
        a, b = b, a
    return a * (2 * n - a - 1) // 2 + (b - a - 1)


def pairs(n: int):
    return combinations(range(n), 2)


def iter_bits(mask: int):
    """Yield the indices of set bits in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


class Triangle(NamedTuple):
    """Directed triangle ``a -> b -> c -> a`` rotated so ``a`` is the smallest id."""

    a: int
    b: int
    c: int

    def vertices(self) -> frozenset[int]:
        return frozenset(self)


class Tournament:
    """Immutable tournament on vertices ``0..n-1``."""

    __slots__ = ("n", "bits", "out", "inn")

    def __init__(self, n: int, bits: int = 0):
        if n < 0:
            raise ValidationError(f"vertex count must be >= 0, got {n}")
        m = n * (n - 1) // 2
        if bits < 0 or bits >> m:
            raise ValidationError(f"orientation bits exceed {m} pairs")
        out = [0] * n
        inn = [0] * n
        k = 0
        for a in range(n):
            for b in range(a + 1, n):
                if bits >> k & 1:
                    out[a] |= 1 << b
                    inn[b] |= 1 << a
                else:
                    out[b] |= 1 << a
                    inn[a] |= 1 << b
                k += 1
        self.n = n
        self.bits = bits
        self.out = tuple(out)
        self.inn = tuple(inn)

    @classmethod
    def from_out_masks(cls, outs: Sequence[int]) -> "Tournament":
        n = len(outs)
        bits = 0
        k = 0
        for a in range(n):
            for b in range(a + 1, n):
                if outs[a] >> b & 1:
                    bits |= 1 << k
                k += 1
        t = cls(n, bits)
        if t.out != tuple(outs):
            raise ValidationError("out-masks do not describe a tournament")
        return t

    @classmethod
    def from_bitstring(cls, s: str) -> "Tournament":
        """Inverse of :meth:`bitstring`; the length must be a triangular number."""
        m = len(s)
        n = 0
        while n * (n - 1) // 2 < m:
            n += 1
        if n * (n - 1) // 2 != m:
            raise ValidationError(f"bit string length {m} is not C(n,2) for any n")
        bits = 0
        for k, ch in enumerate(s):
            if ch == "1":
                bits |= 1 << k
            elif ch != "0":
                raise ValidationError(f"bad orientation character {ch!r} at position {k}")
        return cls(n, bits)

    def bitstring(self) -> str:
        m = self.n * (self.n - 1) // 2
        return "".join("1" if self.bits >> k & 1 else "0" for k in range(m))

    def arc(self, u: int, v: int) -> bool:
        """True iff ``u -> v``."""
        return bool(self.out[u] >> v & 1)

    def arcs(self) -> list[tuple[int, int]]:
        return [(a, b) if self.arc(a, b) else (b, a) for a, b in pairs(self.n)]

    def in_degrees(self) -> list[int]:
        return [m.bit_count() for m in self.inn]

    def out_degrees(self) -> list[int]:
        return [m.bit_count() for m in self.out]

    @property
    def all_mask(self) -> int:
        return (1 << self.n) - 1

    def __eq__(self, other):
        return isinstance(other, Tournament) and (self.n, self.bits) == (other.n, other.bits)

    def __hash__(self):
        return hash((self.n, self.bits))

    def __repr__(self):
        return f"Tournament(n={self.n}, bits={self.bitstring()!r})"


@dataclass(frozen=True)
class WeightedTournament:
    t: Tournament
    w: tuple[Fraction, ...]

    def __post_init__(self):
        w = tuple(Fraction(x) for x in self.w)
        object.__setattr__(self, "w", w)
        if len(w) != self.t.n:
            raise ValidationError(f"expected {self.t.n} weights, got {len(w)}")
        for v, x in enumerate(w):
            if x < 0:
                raise ValidationError(f"weight of vertex {v} is negative ({x})")

    @classmethod
    def unit(cls, t: Tournament) -> "WeightedTournament":
        return cls(t, (Fraction(1),) * t.n)

    @property
    def n(self) -> int:
        return self.t.n

    def weight(self, vertices: Iterable[int]) -> Fraction:
        return sum((self.w[v] for v in vertices), Fraction(0))

    def mask_weight(self, mask: int) -> Fraction:
        return sum((self.w[v] for v in iter_bits(mask)), Fraction(0))

    def total(self) -> Fraction:
        return sum(self.w, Fraction(0))

    def induced(self, s: Iterable[int]) -> tuple["WeightedTournament", dict[int, int]]:
        sub, idx = induced(self.t, s)
        w = [Fraction(0)] * sub.n
        for old, new in idx.items():
            w[new] = self.w[old]
        return WeightedTournament(sub, tuple(w)), idx


@dataclass(frozen=True)
class FvsSolution:
    """A verified feedback vertex set.

    ``certificate`` lists the remaining vertices in topological order (every
    arc among them points forward).  ``bound_used`` is ``(sa_level, lp_value)``
    when a solver proved its ratio against an LP bound.
    """

    chosen: frozenset[int]
    weight: Fraction
    certificate: tuple[int, ...]
    bound_used: tuple[int, float] | None = None


@dataclass(frozen=True)
class FvsViolation:
    """Returned by :func:`verify_fvs` when a triangle survives."""

    triangle: Triangle


def build(n: int, arcs: Iterable[tuple[int, int]]) -> Tournament:
    """Build a tournament from an explicit arc list covering every pair once."""
    if n < 0:
        raise ValidationError(f"vertex count must be >= 0, got {n}")
    seen: dict[tuple[int, int], tuple[int, int]] = {}
    bits = 0
    for u, v in arcs:
        if not (0 <= u < n and 0 <= v < n):
            raise ValidationError(f"arc ({u},{v}) has a vertex outside 0..{n - 1}")
        if u == v:
            raise ValidationError(f"self-loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ValidationError(f"pair {key} given twice: {seen[key]} and {(u, v)}")
        seen[key] = (u, v)
        if u < v:
            bits |= 1 << pair_index(n, u, v)
    for a, b in pairs(n):
        if (a, b) not in seen:
            raise ValidationError(f"pair ({a},{b}) has no orientation")
    return Tournament(n, bits)


def transitive(n: int) -> Tournament:
    """The transitive tournament with ``u -> v`` whenever ``u < v``."""
    return Tournament(n, (1 << (n * (n - 1) // 2)) - 1)


def cycle3() -> Tournament:
    return build(3, [(0, 1), (1, 2), (2, 0)])


def triangles_in(t: Tournament, mask: int | None = None) -> list[Triangle]:
    """Directed triangles inside the vertex set ``mask`` (all vertices by default)."""
    if mask is None:
        mask = t.all_mask
    found = []
    out, inn = t.out, t.inn
    for a in iter_bits(mask):
        above = mask & ~((2 << a) - 1)
        for b in iter_bits(out[a] & above):
            for c in iter_bits(out[b] & inn[a] & above):
                found.append(Triangle(a, b, c))
    found.sort()
    return found


def triangles(t: Tournament) -> list[Triangle]:
    """All directed triangles, each once, in lexicographic order."""
    return triangles_in(t)


def first_triangle(t: Tournament, mask: int) -> Triangle | None:
    """Lexicographically first triangle inside ``mask``, or None."""
    out, inn = t.out, t.inn
    for a in iter_bits(mask):
        above = mask & ~((2 << a) - 1)
        best = None
        for b in iter_bits(out[a] & above):
            cs = out[b] & inn[a] & above
            if cs:
                c = (cs & -cs).bit_length() - 1
                if best is None or (b, c) < best:
                    best = (b, c)
        if best is not None:
            return Triangle(a, *best)
    return None


def mask_is_acyclic(t: Tournament, mask: int) -> bool:
    """A subtournament is acyclic iff its in-degrees are exactly 0..k-1."""
    degs = sorted((t.inn[v] & mask).bit_count() for v in iter_bits(mask))
    return all(d == i for i, d in enumerate(degs))


def mask_topological_order(t: Tournament, mask: int) -> tuple[int, ...] | None:
    verts = list(iter_bits(mask))
    keyed = sorted(verts, key=lambda v: (t.inn[v] & mask).bit_count())
    for i, v in enumerate(keyed):
        if (t.inn[v] & mask).bit_count() != i:
            return None
    return tuple(keyed)


def is_acyclic(t: Tournament) -> tuple[bool, tuple[int, ...] | None]:
    """Decide acyclicity by in-degree sort; on success also return a topological order."""
    order = mask_topological_order(t, t.all_mask)
    return order is not None, order


def induced(t: Tournament, s: Iterable[int]) -> tuple[Tournament, dict[int, int]]:
    """Subtournament on ``s``; vertices are renumbered in increasing order of old id."""
    verts = sorted(set(s))
    for v in verts:
        if not 0 <= v < t.n:
            raise ValidationError(f"vertex {v} outside 0..{t.n - 1}")
    idx = {old: new for new, old in enumerate(verts)}
    k = len(verts)
    bits = 0
    pos = 0
    for i in range(k):
        for j in range(i + 1, k):
            if t.out[verts[i]] >> verts[j] & 1:
                bits |= 1 << pos
            pos += 1
    return Tournament(k, bits), idx


def relabel(t: Tournament, perm: Sequence[int]) -> Tournament:
    """Tournament with vertex ``v`` renamed to ``perm[v]``."""
    outs = [0] * t.n
    for u in range(t.n):
        for v in iter_bits(t.out[u]):
            outs[perm[u]] |= 1 << perm[v]
    return Tournament.from_out_masks(outs)


def _refine(t: Tournament, colors: list[int]) -> list[int]:
    """Equitable colour refinement by out-degree into each colour class.

    Colours are re-ranked by sorted signature, so the result is equivariant
    under relabelling (a prerequisite for the min-over-leaves canonical form).
    """
    n = t.n
    start = {c: i for i, c in enumerate(sorted(set(colors)))}
    colors = [start[c] for c in colors]
    ncls = len(start)
    while True:
        cls_mask = [0] * ncls
        for v, c in enumerate(colors):
            cls_mask[c] |= 1 << v
        sigs = [
            (colors[v],) + tuple((t.out[v] & cm).bit_count() for cm in cls_mask)
            for v in range(n)
        ]
        ranks = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [ranks[s] for s in sigs]
        if len(ranks) == ncls:
            return new
        colors, ncls = new, len(ranks)


def _encode(t: Tournament, order: Sequence[int]) -> int:
    code = 0
    out = t.out
    k = len(order)
    for i in range(k):
        row = out[order[i]]
        for j in range(i + 1, k):
            code = code << 1 | (row >> order[j] & 1)
    return code


def _canonical_code(t: Tournament) -> tuple[int, list[int]]:
    n = t.n
    if n == 0:
        return 0, []
    best: list = [None, None]

    def search(colors: list[int]):
        colors = _refine(t, colors)
        ncls = max(colors) + 1
        if ncls == n:
            order = sorted(range(n), key=colors.__getitem__)
            code = _encode(t, order)
            if best[0] is None or code < best[0]:
                best[0], best[1] = code, order
            return
        sizes = [0] * ncls
        for c in colors:
            sizes[c] += 1
        target = next(c for c in range(ncls) if sizes[c] > 1)
        for v in range(n):
            if colors[v] != target:
                continue
            split = [2 * c + (1 if c == target and u != v else 0) for u, c in enumerate(colors)]
            ranks = {c: i for i, c in enumerate(sorted(set(split)))}
            search([ranks[c] for c in split])

    search(t.in_degrees())
    return best[0], best[1]


def canonical_form(t: Tournament) -> bytes:
    """Isomorphism-invariant encoding: equal for two tournaments iff they are isomorphic.

    The encoding is one byte ``n`` followed by the row-major pair bits of the
    relabelling that minimises them, where only relabellings consistent with
    in-degree-seeded colour refinement (and individualisation of one vertex at
    a time) are tried.  Refinement is equivariant, so the minimum is still an
    invariant.
    """
    if t.n > CANONICAL_MAX_N:
        raise SizeLimitError(f"canonical_form supports n <= {CANONICAL_MAX_N}, got {t.n}")
    code, _ = _canonical_code(t)
    m = t.n * (t.n - 1) // 2
    return bytes([t.n]) + code.to_bytes((m + 7) // 8, "big")


def canonical_labeling(t: Tournament) -> list[int]:
    """The vertex order realising :func:`canonical_form` (position -> old vertex)."""
    if t.n > CANONICAL_MAX_N:
        raise SizeLimitError(f"canonical_form supports n <= {CANONICAL_MAX_N}, got {t.n}")
    return _canonical_code(t)[1]


def from_canonical(form: bytes) -> Tournament:
    """Tournament whose natural labelling is the one encoded by ``form``."""
    n = form[0]
    m = n * (n - 1) // 2
    code = int.from_bytes(form[1:], "big")
    bits = 0
    for k in range(m):
        if code >> (m - 1 - k) & 1:
            bits |= 1 << k
    return Tournament(n, bits)


def random_tournament(n: int, seed: int) -> Tournament:
    """Uniform random labelled tournament.

    Uses the standard library's Mersenne Twister (``random.Random(seed)``),
    whose integer seeding and ``getrandbits`` stream are fixed across
    platforms.  Pairs are visited in lexicographic order and each takes one
    ``getrandbits(1)`` draw: 1 means ``u -> v`` for ``u < v``.
    """
    if n < 0:
        raise ValidationError(f"vertex count must be >= 0, got {n}")
    rng = random.Random(seed)
    bits = 0
    for k in range(n * (n - 1) // 2):
        if rng.getrandbits(1):
            bits |= 1 << k
    return Tournament(n, bits)


def verify_fvs(wt: WeightedTournament, x: Iterable[int]) -> FvsSolution | FvsViolation:
    """Check that removing ``x`` leaves an acyclic tournament."""
    t = wt.t
    chosen = frozenset(x)
    for v in chosen:
        if not 0 <= v < t.n:
            raise ValidationError(f"vertex {v} outside 0..{t.n - 1}")
    rest = t.all_mask & ~to_mask(chosen)
    order = mask_topological_order(t, rest)
    if order is None:
        return FvsViolation(first_triangle(t, rest))
    return FvsSolution(chosen, wt.weight(chosen), order)

