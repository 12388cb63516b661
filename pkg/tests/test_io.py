import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from known_tournaments import heavy_t5
from fvst.cli import run_algorithm
from fvst.errors import ValidationError
from fvst.generators import random_light, random_t5_free, seeded_random, weighted
from fvst.io import (
    InstanceFile,
    ParseError,
    RunReport,
    emit_instance,
    emit_instance_file,
    format_rational,
    instance_hash,
    parse_instance,
    parse_instance_file,
    parse_rational,
    read_report,
    validate_report,
    write_report,
)
from fvst.lp import DEFAULT_TOL
from fvst.tournament import Tournament, WeightedTournament, build, cycle3, random_tournament

GOLDEN = Path(__file__).parent / "data" / "golden"


def test_parse_small_examples():
    wt = parse_instance("1\n1\n\n")
    assert wt.n == 1 and wt.w == (1,)
    wt = parse_instance("3\n1 1 1\n110\n")
    # pair (0,1): 0 wins, pair (0,2): 0 wins, pair (1,2): 2 wins
    assert wt.t == build(3, [(0, 1), (0, 2), (2, 1)])
    assert parse_instance("0\n\n\n").n == 0


def test_emit_c3():
    assert emit_instance(WeightedTournament.unit(cycle3())) == "3\n1 1 1\n101\n"


def test_weights_are_exact():
    wt = parse_instance("3\n0.1 2/6 7\n101\n")
    assert wt.w == (Fraction(1, 10), Fraction(1, 3), Fraction(7))
    assert emit_instance(wt) == "3\n1/10 1/3 7\n101\n"
    assert parse_rational("0.25") == Fraction(1, 4)
    assert format_rational(Fraction(6, 4)) == "3/2"
    for bad in ("-1", "1e3", "1/0", "x", ""):
        with pytest.raises(ValueError):
            parse_rational(bad)


def test_comments_and_provenance():
    text = "# name: tiny\n# seed: 17\n3  # vertices\n1 2 3\n# bits follow\n101\n\n\n"
    inst = parse_instance_file(text)
    assert inst.name == "tiny" and inst.seed == 17
    assert inst.wt.w == (1, 2, 3)
    assert emit_instance_file(inst) == "# name: tiny\n# seed: 17\n3\n1 2 3\n101\n"
    # blank lines are data (an empty bit line is legal), so one cannot stand in for weights
    with pytest.raises(ParseError, match="expected 3 weights"):
        parse_instance("3\n\n1 2 3\n101\n")


@pytest.mark.parametrize(
    "text, line, col, fragment",
    [
        ("", 1, 1, "missing vertex count"),
        ("x\n", 1, 1, "vertex count"),
        ("3\n", 2, 1, "missing weight line"),
        ("3\n1 1\n101\n", 2, 1, "expected 3 weights"),
        ("3\n1 -1 1\n101\n", 2, 3, "not a nonnegative"),
        ("3\n1 1 1\n", 3, 1, "missing orientation line"),
        ("3\n1 1 1\n10\n", 3, 1, "expected 3 orientation bits"),
        ("3\n1 1 1\n1a1\n", 3, 2, "must be 0 or 1"),
        ("3\n1 1 1\n  10x\n", 3, 5, "must be 0 or 1"),
        ("3\n1 1 1\n101\n5\n", 4, 1, "unexpected content"),
    ],
)
def test_parse_errors_are_located(text, line, col, fragment):
    with pytest.raises(ParseError, match=fragment) as info:
        parse_instance(text)
    assert (info.value.line, info.value.col) == (line, col)
    assert str(info.value).startswith(f"line {line}, column {col}:")


def test_golden_files():
    built = {
        "c3_unit.txt": WeightedTournament.unit(cycle3()),
        "heavy_t5_mixed.txt": WeightedTournament(
            heavy_t5(), (Fraction(1, 2), Fraction(3), Fraction(1, 4), Fraction(7, 3), Fraction(0))
        ),
        "seeded_8_2024.txt": weighted(seeded_random(8, 2024), 2024, "uniform-int"),
        "empty.txt": WeightedTournament.unit(Tournament(0)),
        "single.txt": WeightedTournament.unit(Tournament(1)),
    }
    assert sorted(p.name for p in GOLDEN.iterdir()) == sorted(built)
    for name, wt in built.items():
        raw = (GOLDEN / name).read_bytes()
        assert emit_instance(wt).encode() == raw, name
        assert parse_instance(raw.decode()) == wt


def test_round_trip_of_generated_corpus():
    makers = [random_tournament, random_light, random_t5_free]
    for i in range(100):
        n = i % 16
        t = makers[i % 3](n, i)
        wt = weighted(t, i, "uniform-int" if i % 2 else "unit")
        text = emit_instance_file(InstanceFile(wt, f"case-{i}", i))
        back = parse_instance_file(text)
        assert back == InstanceFile(wt, f"case-{i}", i)
        assert emit_instance_file(back) == text


@settings(max_examples=200, deadline=None)
@given(
    st.integers(0, 9).flatmap(
        lambda n: st.tuples(
            st.integers(0, max(0, (1 << (n * (n - 1) // 2)) - 1)),
            st.lists(st.fractions(0, 100, max_denominator=50), min_size=n, max_size=n),
        ).map(lambda p: WeightedTournament(Tournament(n, p[0]), tuple(p[1])))
    )
)
def test_parse_emit_inverse(wt):
    text = emit_instance(wt)
    assert parse_instance(text) == wt
    assert emit_instance(parse_instance(text)) == text


def test_instance_hash_depends_on_labels_and_weights():
    a = WeightedTournament.unit(random_tournament(6, 1))
    b = WeightedTournament(a.t, (2,) + a.w[1:])
    assert instance_hash(a) == instance_hash(parse_instance(emit_instance(a)))
    assert instance_hash(a) != instance_hash(b)
    assert len(instance_hash(a)) == 64


# ---- reports ------------------------------------------------------------------


def _minimal_report():
    wt = WeightedTournament.unit(cycle3())
    cfg = {"eps_feas": 1e-7, "eps_obj": 1e-6, "eps_int": 1e-4}
    return RunReport("exact", wt, [0], Fraction(1), cfg)


def test_minimal_report_round_trips():
    data = write_report(_minimal_report())
    back = read_report(data)
    assert back.chosen == [0] and back.weight == 1 and back.instance == WeightedTournament.unit(cycle3())
    assert write_report(back) == data


@pytest.mark.parametrize("alg", ["sa73", "cdz", "lr3", "exact", "layers"])
def test_solver_reports_round_trip(alg):
    seed = 11
    maker = random_t5_free if alg in ("cdz", "layers") else random_tournament
    wt = weighted(maker(10, seed), seed, "uniform-int")
    rep = run_algorithm(alg, wt, DEFAULT_TOL, trace=True)
    data = write_report(rep)
    assert write_report(read_report(data)) == data


def test_report_with_seven_thirds_certificate():
    wt = WeightedTournament.unit(random_tournament(12, 4))
    doc = json.loads(write_report(run_algorithm("sa73", wt, DEFAULT_TOL)))
    validate_report(doc)
    assert doc["ratios"]["guarantee"] == "7/3"
    assert doc["ratios"]["bound_level"] == 1
    assert doc["ratios"]["within_guarantee"] is True
    w = Fraction(doc["weight"])
    assert float(w) <= 7 / 3 * doc["bounds"]["sa1"] * (1 + 1e-6)


def _doc():
    return json.loads(write_report(_minimal_report()))


@pytest.mark.parametrize(
    "mutate, path",
    [
        (lambda d: d.update(weight="1.5"), "$.weight"),
        (lambda d: d.update(weight="-1"), "$.weight"),
        (lambda d: d.update(weight=1), "$.weight"),
        (lambda d: d.update(weight="2"), "$.weight"),
        (lambda d: d.update(chosen=[]), "$.chosen"),
        (lambda d: d.update(chosen=[7]), "$.chosen"),
        (lambda d: d.update(chosen=["0"]), "$.chosen[0]"),
        (lambda d: d.update(instance_hash="0" * 64), "$.instance_hash"),
        (lambda d: d.update(algorithm="magic"), "$.algorithm"),
        (lambda d: d["config"].update(eps_feas="tiny"), "$.config.eps_feas"),
        (lambda d: d.update(extra=1), "$"),
    ],
)
def test_corrupted_reports_are_rejected_with_paths(mutate, path):
    doc = _doc()
    mutate(doc)
    with pytest.raises(ValidationError) as info:
        read_report(json.dumps(doc))
    assert str(info.value).startswith(path + ":")


def test_report_not_json():
    with pytest.raises(ValidationError, match="not JSON"):
        read_report(b"{")


@settings(max_examples=100, deadline=None)
@given(st.text(min_size=1, max_size=8))
def test_fuzzed_weight_strings(s):
    doc = _doc()
    doc["weight"] = s
    try:
        rep = read_report(json.dumps(doc))
    except ValidationError as exc:
        assert str(exc).startswith("$.weight:")
    else:
        assert rep.weight == 1
