import itertools
import json
from fractions import Fraction
from importlib import resources
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from known_tournaments import (
    A, B, C, D, E, DR, FR, ROOTED_FIXED, S5_FIXED, S7_FIXED, completions, light_t5, heavy_t5,
)
from fvst.errors import SizeLimitError
from fvst.generators import random_light
from fvst.structure import (
    FamilyCensus,
    bfs_layers,
    diagonal_pairs,
    enumerate_family,
    find_2_in_dominating_pair,
    heavy_triangles,
    in_neighborhood,
    is_diagonal,
    is_light,
    is_t5_free,
    load_census,
    min_fvs_size,
)
from fvst.tournament import (
    Tournament,
    build,
    canonical_form,
    cycle3,
    induced,
    random_tournament,
    transitive,
    triangles,
)


def tournaments(max_n=8):
    return st.integers(0, max_n).flatmap(
        lambda n: st.integers(0, (1 << comb(n, 2)) - 1).map(lambda b: Tournament(n, b))
    )


def tri_sets(t):
    return {frozenset(x) for x in triangles(t)}


def brute_diagonal(t, a, b):
    ts = tri_sets(t)
    for u, v in itertools.combinations(sorted(set(range(t.n)) - {a, b}), 2):
        if frozenset((u, v, a)) in ts and frozenset((u, v, b)) in ts:
            return True
    return False


# ---- diagonals and heaviness ------------------------------------------------


def test_no_diagonals_in_acyclic():
    t = transitive(6)
    assert all(is_diagonal(t, a, b) is None for a, b in itertools.combinations(range(6), 2))


def test_diagonal_in_s5_configuration():
    s = build(5, S5_FIXED + [(1, 2), (4, 3)])  # u1 -> u2, v2 -> v1
    z, u1, u2, v1, v2 = range(5)
    rep = is_diagonal(s, z, v2)
    assert rep is not None and set(rep.witnesses) == {v1, u1}
    assert (z, v2, u2) in [tuple(x) for x, _ in heavy_triangles(s)]


def test_diagonal_in_rooted_configuration():
    for s in completions(8, ROOTED_FIXED):
        rep = is_diagonal(s, DR, FR)
        assert rep is not None
        ts = tri_sets(s)
        u, v = rep.witnesses
        assert frozenset((u, v, DR)) in ts and frozenset((u, v, FR)) in ts


@settings(max_examples=150, deadline=None)
@given(tournaments())
def test_diagonal_symmetry_and_witnesses(t):
    for a, b in itertools.combinations(range(t.n), 2):
        r1, r2 = is_diagonal(t, a, b), is_diagonal(t, b, a)
        assert (r1 is None) == (r2 is None) == (not brute_diagonal(t, a, b))
        if r1 is not None:
            u, v = r1.witnesses
            assert frozenset((u, v, a)) in tri_sets(t) and frozenset((u, v, b)) in tri_sets(t)
    assert diagonal_pairs(t) == {(a, b) for a, b in itertools.combinations(range(t.n), 2) if brute_diagonal(t, a, b)}


@settings(max_examples=150, deadline=None)
@given(tournaments())
def test_heavy_triangles_brute_force(t):
    diag = diagonal_pairs(t)
    expect = []
    for tri in triangles(t):
        ds = [p for p in itertools.combinations(sorted(tri), 2) if p in diag]
        if len(ds) >= 2:
            expect.append(tri)
    assert [x for x, _ in heavy_triangles(t)] == expect
    assert is_light(t) == (not expect)


def test_heavy_examples():
    assert heavy_triangles(cycle3()) == []
    heavy = [set(x) for x, _ in heavy_triangles(heavy_t5())]
    assert {D, E, C} in heavy
    assert heavy_triangles(light_t5(True)) == [] and heavy_triangles(light_t5(False)) == []
    assert is_light(transitive(5)) and not is_light(heavy_t5())
    assert is_light(light_t5(True)) and is_light(light_t5(False))


@pytest.mark.parametrize("seed", range(40))
def test_light_is_hereditary(seed):
    t = random_light(6 + seed % 6, seed)
    assert is_light(t)
    for v in range(t.n):
        sub, _ = induced(t, set(range(t.n)) - {v})
        assert is_light(sub)


def test_s5_completions_heavy_or_same_index():
    # every completion is heavy unless u_i -> u_{3-i} and v_i -> v_{3-i} for the same i
    z, u1, u2, v1, v2 = range(5)
    total = 0
    for s in completions(5, S5_FIXED):
        total += 1
        same_index = s.arc(u1, u2) == s.arc(v1, v2)
        assert (not is_light(s)) or same_index
    assert total == 4


def test_s5_with_fixed_orientation_is_heavy():
    for s in completions(5, S5_FIXED + [(1, 2), (4, 3)]):
        assert not is_light(s)


def test_s7_completions_all_heavy():
    count = 0
    for s in completions(7, S7_FIXED):
        count += 1
        assert not is_light(s)
        assert min_fvs_size(s) >= 3
    assert count == 64


def test_rooted_configuration_is_heavy():
    for s in completions(8, ROOTED_FIXED):
        assert not is_light(s)


# ---- neighbourhoods and layers ---------------------------------------------


def test_bfs_layers_examples():
    assert bfs_layers(cycle3(), 0) == [{0}, {2}, {1}]
    t = transitive(5)
    assert bfs_layers(t, 4) == [{4}, {0, 1, 2, 3}]
    assert bfs_layers(light_t5(), E)[1] == {B, D}


def test_in_neighborhood_examples():
    assert in_neighborhood(cycle3(), {0, 1, 2}, range(3)) == frozenset()
    assert in_neighborhood(cycle3(), {0}, range(3)) == {2}
    assert in_neighborhood(light_t5(), {E}, range(5)) == {B, D}


def _reaches(t, z, universe):
    seen = {z}
    stack = [z]
    while stack:
        v = stack.pop()
        for u in universe:
            if u not in seen and t.arc(u, v):
                seen.add(u)
                stack.append(u)
    return seen


@settings(max_examples=100, deadline=None)
@given(tournaments(9), st.data())
def test_bfs_layer_properties(t, data):
    if t.n == 0:
        return
    universe = data.draw(st.sets(st.integers(0, t.n - 1), min_size=1))
    z = data.draw(st.sampled_from(sorted(universe)))
    layers = bfs_layers(t, z, universe)
    assert layers[0] == {z}
    union = set().union(*layers)
    assert sum(len(x) for x in layers) == len(union)
    assert union == _reaches(t, z, universe)
    where = {v: i for i, lay in enumerate(layers) for v in lay}
    for u in union:
        for v in union:
            if u != v and t.arc(u, v):
                # no arc jumps forward towards z by more than one layer
                assert not where[u] > where[v] + 1


def test_domination_pair_examples():
    assert find_2_in_dominating_pair(cycle3(), {1, 2}, set()) == (1, 1)
    assert find_2_in_dominating_pair(cycle3(), {0}, {2}) == (0, 0)
    assert find_2_in_dominating_pair(cycle3(), {0}, {1}) is None


def _brute_pair(t, cands, targets):
    cands = sorted(cands)
    for i, z in enumerate(cands):
        for z2 in cands[i:]:
            if all(t.arc(s, z) or t.arc(s, z2) for s in targets):
                return z, z2
    return None


@pytest.mark.parametrize("block", range(10))
def test_light_second_layer_dominates_third(block):
    # 100 light instances per block, n <= 10, every root z
    for seed in range(block * 100, block * 100 + 100):
        t = random_light(4 + seed % 7, seed)
        for z in range(t.n):
            lay = bfs_layers(t, z)
            if len(lay) < 3:
                continue
            pair = find_2_in_dominating_pair(t, lay[1], lay[2])
            assert pair is not None, (t.bitstring(), z)
            assert set(pair) == set(_brute_pair(t, lay[1], lay[2]))


def test_domination_pair_weight_orientation():
    # transitive 0->1->2->3: candidates {1,2}, targets {0}; only 1 and 2 are hit by 0
    t = transitive(4)
    w = [Fraction(1)] * 4
    assert find_2_in_dominating_pair(t, {1, 2}, {0}, w) == (1, 1)
    # targets 2 and 3 each hit exactly one candidate: 2 -> 0 and 3 -> 1
    t = build(4, [(2, 0), (0, 3), (3, 1), (1, 2), (0, 1), (2, 3)])
    assert find_2_in_dominating_pair(t, {0, 1}, {2, 3}, [1, 1, 5, 1]) == (0, 1)
    assert find_2_in_dominating_pair(t, {0, 1}, {2, 3}, [1, 1, 1, 5]) == (1, 0)
    assert find_2_in_dominating_pair(t, {0, 1}, {2, 3}, [1, 1, 2, 2]) == (0, 1)


# ---- T5 freeness ------------------------------------------------------------


def test_t5_free_examples():
    assert is_t5_free(random_tournament(4, 3)) is None
    assert is_t5_free(heavy_t5()) == (0, 1, 2, 3, 4)
    assert is_t5_free(light_t5()) == (0, 1, 2, 3, 4)
    assert is_t5_free(transitive(9)) is None


@pytest.mark.parametrize("n", [5, 6, 7])
def test_t5_free_matches_subset_search(n):
    t5 = set(enumerate_family(5, 2).members)
    for seed in range(60):
        t = random_tournament(n, 1000 * n + seed)
        expect = None
        for sub in itertools.combinations(range(n), 5):
            if canonical_form(induced(t, sub)[0]) in t5:
                expect = sub
                break
        assert is_t5_free(t) == expect


@pytest.mark.parametrize("seed", range(200))
def test_second_layer_of_min_indegree_root_is_t5_free(seed):
    t = random_light(5 + seed % 12, seed)
    indeg = t.in_degrees()
    low = min(indeg, default=0)
    for z in range(t.n):
        if indeg[z] == low:
            sub, _ = induced(t, in_neighborhood(t, {z}, range(t.n)))
            assert is_t5_free(sub) is None


# ---- minimum FVS size and the census ---------------------------------------


def _brute_min_fvs(t):
    for k in range(t.n + 1):
        for x in itertools.combinations(range(t.n), k):
            rest, _ = induced(t, set(range(t.n)) - set(x))
            if not triangles(rest):
                return k


def test_min_fvs_size_examples():
    assert min_fvs_size(transitive(6)) == 0
    assert min_fvs_size(cycle3()) == 1
    assert min_fvs_size(light_t5()) == min_fvs_size(heavy_t5()) == 2
    with pytest.raises(SizeLimitError):
        min_fvs_size(random_tournament(17, 0))


@settings(max_examples=80, deadline=None)
@given(tournaments(8))
def test_min_fvs_size_brute_force(t):
    assert min_fvs_size(t) == _brute_min_fvs(t)


def test_census_order_5():
    census = enumerate_family(5, 2)
    assert len(census.members) == 3
    assert census.heavy_count == 1 and census.light_count == 2
    assert canonical_form(heavy_t5()) in census.members
    assert canonical_form(light_t5(True)) in census.members
    assert canonical_form(light_t5(False)) in census.members


def test_census_order_7():
    census = enumerate_family(7, 3)
    assert len(census.members) == 121
    assert census.heavy_count == 120
    assert len(set(census.members)) == 121
    sizes = sorted(min_fvs_size(_from(m)) for m in census.members)
    # one member (the quadratic residue tournament) needs four vertices
    assert sizes == [3] * 120 + [4]


def _from(form):
    from fvst.tournament import from_canonical

    return from_canonical(form)


@pytest.mark.parametrize("k,f", [(5, 2), (7, 3)])
def test_shipped_census_matches_enumeration(k, f):
    text = resources.files("fvst.data").joinpath(f"census_{k}_{f}.json").read_text()
    shipped = FamilyCensus.from_json(text)
    fresh = enumerate_family(k, f)
    assert shipped.members == fresh.members and shipped.light == fresh.light
    assert load_census(k, f).members == fresh.members


def test_census_json_validation():
    census = enumerate_family(5, 2)
    doc = json.loads(census.to_json())
    assert doc["count"] == 3 and doc["heavy_count"] + doc["light_count"] == 3
    doc["heavy_count"] = 2
    with pytest.raises(ValueError):
        FamilyCensus.from_json(json.dumps(doc))
    doc = json.loads(census.to_json())
    doc["members"].append(doc["members"][0])
    doc["light_count"] += doc["members"][0]["light"]
    doc["heavy_count"] += not doc["members"][0]["light"]
    with pytest.raises(ValueError):
        FamilyCensus.from_json(json.dumps(doc))


def test_enumerate_family_size_cap():
    with pytest.raises(SizeLimitError):
        enumerate_family(8, 3)
