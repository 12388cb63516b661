"""Constraint systems for the basic triangle relaxation and its one-round lift.

Variables ``0..n-1`` are the vertex variables ``x_v``.  At level 1 they are
followed by one variable ``x_ab`` per unordered pair, in the same flat pair
order the tournament uses for its orientation bits.  Every row is
``coeffs . x >= rhs`` with small integer coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from ..tournament import WeightedTournament, pairs, triangles

# row families, used for lazy separation and for diagnostics
ROW_COVER = 0        # x_a + x_b + x_c >= 1
ROW_LIFT_MIDDLE = 1  # x_a + x_b + x_c >= 1 + x_ma + x_mb   (times 1 - x_m)
ROW_LIFT_TIMES = 2   # x_ad + x_bd + x_cd >= x_d            (times x_d)
ROW_LIFT_MINUS = 3   # x_a + x_b + x_c + x_d >= 1 + x_ad + x_bd + x_cd  (times 1 - x_d)
ROW_PAIR_BOUND = 4   # x_a >= x_ab


@dataclass
class LpModel:
    """``min objective . x`` subject to ``A x >= rhs`` and ``lower <= x <= upper``."""

    n: int
    level: int
    objective: tuple[Fraction, ...]
    A: sp.csr_matrix
    rhs: np.ndarray
    kinds: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    @property
    def num_rows(self) -> int:
        return self.A.shape[0]

    def variables(self) -> list[tuple[str, int | tuple[int, int]]]:
        names: list = [("v", v) for v in range(self.n)]
        if self.level >= 1:
            names.extend(("p", ab) for ab in pairs(self.n))
        return names

    def var_names(self) -> list[str]:
        return [f"x{i}" if k == "v" else f"y{i[0]}_{i[1]}" for k, i in self.variables()]

    def rows(self):
        """Yield ``(cols, coefs, rhs)`` for every row, coefficients as ints."""
        A = self.A
        for i in range(A.shape[0]):
            lo, hi = A.indptr[i], A.indptr[i + 1]
            yield (
                A.indices[lo:hi].tolist(),
                [int(c) for c in A.data[lo:hi]],
                int(self.rhs[i]),
            )

    def objective_float(self) -> np.ndarray:
        return np.array([float(c) for c in self.objective])


def _stack(blocks: list[tuple[np.ndarray, np.ndarray, np.ndarray, int]], num_vars: int):
    """Blocks of equal-length rows: (cols[k, width], coefs[width], rhs[k], kind)."""
    data, indices, indptr, rhs, kinds = [], [], [np.zeros(1, dtype=np.int64)], [], []
    offset = 0
    for cols, coefs, r, kind in blocks:
        k, width = cols.shape
        if k == 0:
            continue
        indices.append(cols.reshape(-1))
        data.append(np.tile(np.asarray(coefs, dtype=float), k))
        indptr.append(offset + width * np.arange(1, k + 1))
        offset += width * k
        rhs.append(np.asarray(r, dtype=float))
        kinds.append(np.full(k, kind, dtype=np.int8))
    nrows = sum(len(r) for r in rhs)
    if nrows == 0:
        A = sp.csr_matrix((0, num_vars))
        return A, np.zeros(0), np.zeros(0, dtype=np.int8)
    A = sp.csr_matrix(
        (np.concatenate(data), np.concatenate(indices), np.concatenate(indptr)),
        shape=(nrows, num_vars),
    )
    # rows are built with distinct columns, but a canonical ordering keeps dumps stable
    A.sort_indices()
    return A, np.concatenate(rhs), np.concatenate(kinds)


def _triangle_array(wt: WeightedTournament) -> np.ndarray:
    tris = triangles(wt.t)
    return np.array(tris, dtype=np.int64).reshape(-1, 3)


def _pair_var(n: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    return n + lo * (2 * n - lo - 1) // 2 + (hi - lo - 1)


def build_basic(wt: WeightedTournament) -> LpModel:
    """One covering row per triangle, vertex variables in [0, 1]."""
    n = wt.n
    tri = _triangle_array(wt)
    A, rhs, kinds = _stack([(tri, [1, 1, 1], np.ones(len(tri)), ROW_COVER)], n)
    return LpModel(n, 0, wt.w, A, rhs, kinds, np.zeros(n), np.ones(n))


def sa1_rows(n: int, tri: np.ndarray, with_d_rows: bool = True):
    """Row blocks of the lifted system for the given triangles."""
    blocks = []
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    ones = np.ones(len(tri))
    for m, p, q in ((a, b, c), (b, a, c), (c, a, b)):
        cols = np.stack([a, b, c, _pair_var(n, m, p), _pair_var(n, m, q)], axis=1)
        blocks.append((cols, [1, 1, 1, -1, -1], ones, ROW_LIFT_MIDDLE))
    if with_d_rows and len(tri):
        ti, d = _triangle_fourths(n, tri)
        ta, tb, tc = a[ti], b[ti], c[ti]
        pad, pbd, pcd = _pair_var(n, ta, d), _pair_var(n, tb, d), _pair_var(n, tc, d)
        k = len(ti)
        blocks.append((np.stack([pad, pbd, pcd, d], axis=1), [1, 1, 1, -1], np.zeros(k), ROW_LIFT_TIMES))
        blocks.append(
            (np.stack([ta, tb, tc, d, pad, pbd, pcd], axis=1), [1, 1, 1, 1, -1, -1, -1], np.ones(k), ROW_LIFT_MINUS)
        )
    return blocks


def _triangle_fourths(n: int, tri: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All (triangle index, d) with d outside the triangle."""
    outside = np.ones((len(tri), n), dtype=bool)
    rows = np.arange(len(tri))
    for k in range(3):
        outside[rows, tri[:, k]] = False
    return np.nonzero(outside)


def pair_bound_rows(n: int):
    if n < 2:
        return []
    ab = np.array(list(pairs(n)), dtype=np.int64).reshape(-1, 2)
    pv = n + np.arange(len(ab))
    return [
        (np.stack([ab[:, 0], pv], axis=1), [1, -1], np.zeros(len(ab)), ROW_PAIR_BOUND),
        (np.stack([ab[:, 1], pv], axis=1), [1, -1], np.zeros(len(ab)), ROW_PAIR_BOUND),
    ]


def build_sa1(wt: WeightedTournament, with_d_rows: bool = True) -> LpModel:
    """The one-round Sherali-Adams lift of :func:`build_basic`.

    Per triangle abc: the lift by ``1 - x_m`` for each of the three choices of
    m; per triangle and outside vertex d: the lifts by ``x_d`` and ``1 - x_d``;
    per pair: ``x_a >= x_ab`` and ``x_b >= x_ab``.  Bounds are [0, 1].
    ``with_d_rows=False`` drops the per-d rows (the start model for lazy
    solving).
    """
    n = wt.n
    num_vars = n + n * (n - 1) // 2
    tri = _triangle_array(wt)
    blocks = sa1_rows(n, tri, with_d_rows) + pair_bound_rows(n)
    A, rhs, kinds = _stack(blocks, num_vars)
    objective = wt.w + (Fraction(0),) * (num_vars - n)
    return LpModel(n, 1, objective, A, rhs, kinds, np.zeros(num_vars), np.ones(num_vars))


def add_rows(model: LpModel, blocks) -> LpModel:
    A, rhs, kinds = _stack(blocks, model.num_vars)
    return LpModel(
        model.n,
        model.level,
        model.objective,
        sp.vstack([model.A, A], format="csr"),
        np.concatenate([model.rhs, rhs]),
        np.concatenate([model.kinds, kinds]),
        model.lower,
        model.upper,
    )


def check_point_exact(model: LpModel, x: Sequence[Fraction]) -> list[int]:
    """Indices of rows and bounds violated by ``x`` under exact arithmetic.

    Bound violations are reported as ``-1 - j`` for variable j.
    """
    bad = []
    for j, v in enumerate(x):
        if v < Fraction(model.lower[j]) or v > Fraction(model.upper[j]):
            bad.append(-1 - j)
    for i, (cols, coefs, r) in enumerate(model.rows()):
        if sum((c * x[j] for j, c in zip(cols, coefs)), Fraction(0)) < r:
            bad.append(i)
    return bad


def dump_lp(model: LpModel) -> str:
    """CPLEX-style LP text, readable by most external solvers."""
    names = model.var_names()

    def term(c, j, first):
        name = names[j]
        sign = "-" if c < 0 else ("" if first else "+")
        mag = abs(c)
        body = name if mag == 1 else f"{_lp_num(mag)} {name}"
        return f"{sign} {body}".strip() if first else f"{sign} {body}"

    lines = ["\\ feedback vertex set relaxation", "Minimize"]
    obj = [(c, j) for j, c in enumerate(model.objective) if c != 0]
    obj_terms = " ".join(term(c, j, k == 0) for k, (c, j) in enumerate(obj)) or "0 x0"
    lines.append(f" obj: {obj_terms}")
    lines.append("Subject To")
    for i, (cols, coefs, r) in enumerate(model.rows()):
        body = " ".join(term(c, j, k == 0) for k, (j, c) in enumerate(zip(cols, coefs)))
        lines.append(f" r{i}: {body} >= {r}")
    lines.append("Bounds")
    for j in range(model.num_vars):
        lines.append(f" {_lp_num(model.lower[j])} <= {names[j]} <= {_lp_num(model.upper[j])}")
    lines.append("End")
    return "\n".join(lines) + "\n"


def _lp_num(x) -> str:
    f = Fraction(x).limit_denominator(10**12) if isinstance(x, float) else Fraction(x)
    if f.denominator == 1:
        return str(f.numerator)
    return repr(float(f))


__all__ = [
    "LpModel",
    "add_rows",
    "build_basic",
    "build_sa1",
    "check_point_exact",
    "dump_lp",
    "pair_bound_rows",
    "sa1_rows",
]
