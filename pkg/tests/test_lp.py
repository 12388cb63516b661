import itertools
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from known_tournaments import light_t5, heavy_t5
from fvst.errors import SolverError
from fvst.generators import random_t5_free, weighted
from fvst.lp import (
    all_three_sevenths,
    balanced_optimum,
    build_basic,
    build_sa1,
    check_point_exact,
    dump_lp,
    lp_value,
    max_violation,
    solve,
    solve_exact,
    solve_level,
    solve_sa1_lazy,
)
from fvst.lp.model import ROW_COVER, ROW_LIFT_MIDDLE, ROW_LIFT_MINUS, ROW_LIFT_TIMES, ROW_PAIR_BOUND
from fvst.tournament import Tournament, WeightedTournament, cycle3, induced, random_tournament, transitive, triangles

unit = WeightedTournament.unit


def weighted_tournaments(max_n=6):
    return st.integers(0, max_n).flatmap(
        lambda n: st.tuples(
            st.integers(0, (1 << comb(n, 2)) - 1),
            st.lists(st.integers(0, 6), min_size=n, max_size=n),
        ).map(lambda p: WeightedTournament(Tournament(n, p[0]), tuple(Fraction(x) for x in p[1])))
    )


def test_basic_model_trivial_cases():
    m = build_basic(unit(transitive(5)))
    assert m.num_rows == 0 and m.num_vars == 5
    sol = solve(m)
    assert sol.optimal and sol.objective == 0 and not sol.values.any()
    m = build_basic(unit(cycle3()))
    assert m.num_rows == 1
    sol = solve(m, "vertex")
    assert sol.objective == pytest.approx(1)
    assert sorted(np.round(sol.values, 9)) == [0, 0, 1]


def test_basic_value_of_the_5_vertex_members():
    # both members need two vertices but their relaxations are fractional
    assert solve_exact(build_basic(unit(light_t5(True)))).objective == Fraction(5, 3)
    assert solve_exact(build_basic(unit(light_t5(False)))).objective == Fraction(3, 2)
    assert solve_exact(build_basic(unit(heavy_t5()))).objective == Fraction(5, 3)
    assert lp_value(unit(heavy_t5()), 0) == pytest.approx(5 / 3)


def test_sa1_trivial_cases():
    for n in range(3):
        assert lp_value(unit(random_tournament(n, 1)), 1) == 0
    m = build_sa1(unit(cycle3()))
    kinds = set(m.kinds.tolist())
    assert kinds == {ROW_LIFT_MIDDLE, ROW_PAIR_BOUND}
    assert lp_value(unit(cycle3()), 1) == pytest.approx(1)
    third = [Fraction(1, 3)] * 3 + [Fraction(0)] * 3
    assert check_point_exact(m, third) == []


def test_sa1_on_heavy_t5_matches_exact_solver():
    wt = unit(heavy_t5())
    assert solve_exact(build_sa1(wt)).objective == Fraction(2)
    assert lp_value(wt, 1) == pytest.approx(2)


@pytest.mark.parametrize("seed", range(8))
def test_sa1_model_shape(seed):
    n = 5 + seed
    wt = unit(random_tournament(n, seed))
    m = build_sa1(wt)
    nt = len(triangles(wt.t))
    assert m.num_vars == n + comb(n, 2)
    assert [k for k, _ in m.variables()].count("p") == comb(n, 2)
    counts = {k: int((m.kinds == k).sum()) for k in range(5)}
    assert counts[ROW_COVER] == 0
    assert counts[ROW_LIFT_MIDDLE] == 3 * nt
    assert counts[ROW_LIFT_TIMES] == counts[ROW_LIFT_MINUS] == nt * (n - 3)
    assert counts[ROW_PAIR_BOUND] == 2 * comb(n, 2)
    for cols, coefs, rhs in m.rows():
        assert all(0 <= c < m.num_vars for c in cols)
        assert len(set(cols)) == len(cols)


def _sa1_rows_by_hand(wt):
    """Every SA1 row, straight from the inequalities, as {var: coef} >= rhs."""
    t = wt.t
    n = t.n

    def p(a, b):
        return ("p", (min(a, b), max(a, b)))

    rows = []
    for a, b, c in triangles(t):
        tri = (a, b, c)
        for m in tri:
            o = [v for v in tri if v != m]
            rows.append(({("v", a): 1, ("v", b): 1, ("v", c): 1, p(m, o[0]): -1, p(m, o[1]): -1}, 1))
        for d in range(n):
            if d in tri:
                continue
            rows.append(({p(a, d): 1, p(b, d): 1, p(c, d): 1, ("v", d): -1}, 0))
            rows.append(({("v", a): 1, ("v", b): 1, ("v", c): 1, ("v", d): 1,
                          p(a, d): -1, p(b, d): -1, p(c, d): -1}, 1))
    for a, b in itertools.combinations(range(n), 2):
        rows.append(({("v", a): 1, p(a, b): -1}, 0))
        rows.append(({("v", b): 1, p(a, b): -1}, 0))
    return rows


@pytest.mark.parametrize("seed", range(5))
def test_sa1_rows_match_hand_written_system(seed):
    wt = unit(random_tournament(6, seed))
    m = build_sa1(wt)
    names = m.variables()
    got = sorted(
        (tuple(sorted((names[j], c) for j, c in zip(cols, coefs))), rhs) for cols, coefs, rhs in m.rows()
    )
    want = sorted((tuple(sorted(r.items())), rhs) for r, rhs in _sa1_rows_by_hand(wt))
    assert got == want


@pytest.mark.parametrize("seed", range(30))
def test_three_sevenths_point_is_feasible(seed):
    n = 4 + seed % 10
    m = build_sa1(unit(random_tournament(n, seed)))
    assert check_point_exact(m, all_three_sevenths(n)) == []


def test_random_n20_sa1_below_three_sevenths():
    wt = unit(random_tournament(20, 7))
    assert lp_value(wt, 1) <= 60 / 7 * (1 + 1e-6)


@settings(max_examples=40, deadline=None)
@given(weighted_tournaments(6))
def test_highs_matches_exact_simplex_basic(wt):
    m = build_basic(wt)
    exact = solve_exact(m)
    assert exact.status == "optimal"
    sol = solve(m)
    assert sol.objective == pytest.approx(float(exact.objective), abs=1e-6)


@settings(max_examples=12, deadline=None)
@given(weighted_tournaments(5))
def test_highs_matches_exact_simplex_sa1(wt):
    m = build_sa1(wt)
    exact = solve_exact(m)
    assert exact.status == "optimal"
    assert check_point_exact(m, exact.values) == []
    sol = solve(m)
    assert sol.objective == pytest.approx(float(exact.objective), abs=1e-6)
    assert max_violation(m, sol.values) <= 1e-7


@pytest.mark.parametrize("seed", range(40))
def test_nesting_lazy_and_monotonicity(seed):
    n = 5 + seed % 9
    wt = weighted(random_tournament(n, seed), seed, "uniform-int" if seed % 2 else "unit")
    sa0 = lp_value(wt, 0)
    sa1 = lp_value(wt, 1)
    assert sa1 >= sa0 - 1e-6 * max(1.0, sa0)
    lazy = solve_sa1_lazy(wt)
    assert lazy.objective == pytest.approx(sa1, rel=1e-6, abs=1e-7)
    assert max_violation(build_sa1(wt), lazy.values) <= 1e-7
    sub, _ = wt.induced(range(1, n))
    assert lp_value(sub, 0) <= sa0 + 1e-6
    assert lp_value(sub, 1) <= sa1 + 1e-6


def _greedy_packing_bound(wt):
    """Dual lower bound: vertex-disjoint triangles, each charged its lightest vertex."""
    used = set()
    total = Fraction(0)
    for tri in triangles(wt.t):
        if used.isdisjoint(tri):
            used.update(tri)
            total += min(wt.w[v] for v in tri)
    return total


@pytest.mark.parametrize("seed", range(30))
def test_sa0_dominates_packing_bound(seed):
    wt = weighted(random_tournament(4 + seed % 10, seed), seed, "uniform-int")
    assert float(_greedy_packing_bound(wt)) <= lp_value(wt, 0) + 1e-6


@pytest.mark.parametrize("seed", range(60))
def test_t5_free_basic_vertex_solutions_are_integral(seed):
    t = random_t5_free(5 + seed % 10, seed)
    wt = weighted(t, seed, "uniform-int" if seed % 2 else "unit")
    sol = solve_level(wt, 0, "vertex")
    assert np.max(np.abs(sol.values - np.rint(sol.values)), initial=0) <= 1e-4


def test_zero_row_model_sits_at_lower_bounds():
    sol = solve(build_basic(unit(transitive(3))), "any")
    assert sol.optimal and sol.objective == 0


def test_sa1_size_cap():
    with pytest.raises(SolverError):
        solve_level(unit(random_tournament(41, 0)), 1)
    assert solve_level(unit(random_tournament(6, 0)), 1, max_n=None).optimal


def test_balanced_optimum_is_optimal_and_spread():
    wt = unit(light_t5())
    m = build_sa1(wt)
    base = solve(m)
    bal = balanced_optimum(m, base)
    assert bal.objective == pytest.approx(base.objective, abs=1e-7)
    assert max_violation(m, bal.values) <= 1e-7
    assert max(bal.values[:5]) <= max(base.values[:5]) + 1e-9
    assert max(bal.values[:5]) == pytest.approx(0.4, abs=1e-6)


def test_dump_lp_text():
    wt = WeightedTournament(cycle3(), (Fraction(1), Fraction(1, 2), Fraction(2)))
    text = dump_lp(build_sa1(wt))
    assert text.startswith("\\")
    for section in ("Minimize", "Subject To", "Bounds", "End"):
        assert f"\n{section}\n" in text or text.rstrip().endswith(section)
    assert "obj: x0 + 0.5 x1 + 2 x2" in text
    assert text.count(">=") == build_sa1(wt).num_rows
    basic = dump_lp(build_basic(unit(cycle3())))
    assert " r0: x0 + x1 + x2 >= 1" in basic


def test_induced_restriction_keeps_feasibility():
    # restricting an SA1 point to a subset of vertices stays feasible for the subset
    wt = unit(random_tournament(9, 3))
    sol = solve(build_sa1(wt))
    keep = [0, 2, 3, 5, 6, 8]
    sub, idx = induced(wt.t, keep)
    sub_m = build_sa1(unit(sub))
    names = build_sa1(wt).variables()
    pos = {name: j for j, name in enumerate(names)}
    x = []
    for kind, key in sub_m.variables():
        if kind == "v":
            x.append(sol.values[pos[("v", keep[key])]])
        else:
            a, b = key
            x.append(sol.values[pos[("p", (keep[a], keep[b]))]])
    assert max_violation(sub_m, np.array(x)) <= 1e-7
