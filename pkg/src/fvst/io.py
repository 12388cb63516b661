"""Instance files and JSON run reports.

Instance text format::

    # optional comments anywhere; "# name: ..." and "# seed: ..." are kept
    n
    w_0 w_1 ... w_{n-1}        (integers, decimals or p/q)
    b_0 b_1 ... b_{C(n,2)-1}   (0/1 per pair (0,1),(0,2),...,(n-2,n-1); 1 means lower id wins)

The weight line may be absent when n = 0 and the bit line may be empty
when n <= 1.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Any

import jsonschema

from .errors import ValidationError
from .tournament import (
    CANONICAL_MAX_N,
    FvsSolution,
    Tournament,
    WeightedTournament,
    canonical_form,
    verify_fvs,
)

REPORT_SCHEMA_VERSION = 1
_NUMBER = re.compile(r"(\d+)(?:\.(\d+))?|(\d+)/(\d+)")
_META = re.compile(r"#\s*(name|seed)\s*:\s*(.*?)\s*$")


class ParseError(ValidationError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class InstanceFile:
    wt: WeightedTournament
    name: str | None = None
    seed: int | None = None


def parse_rational(token: str) -> Fraction:
    m = _NUMBER.fullmatch(token)
    if m is None:
        raise ValueError(f"not a nonnegative decimal or p/q rational: {token!r}")
    if m.group(3) is not None:
        if int(m.group(4)) == 0:
            raise ValueError(f"zero denominator in {token!r}")
        return Fraction(int(m.group(3)), int(m.group(4)))
    return Fraction(token)


def format_rational(x: Fraction) -> str:
    """Shortest exact spelling: ``3`` or ``3/7``."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_instance_file(text: str) -> InstanceFile:
    meta: dict[str, str] = {}
    lines: list[tuple[int, str, int]] = []  # (line number, content, column offset)
    raw = text.split("\n")
    if raw and raw[-1] == "":
        raw.pop()
    for no, line in enumerate(raw, 1):
        hash_at = line.find("#")
        if hash_at >= 0:
            m = _META.match(line[hash_at:])
            if m:
                meta[m.group(1)] = m.group(2)
            body = line[:hash_at]
            if not body.strip():
                continue
        else:
            body = line
        stripped = body.lstrip()
        lines.append((no, stripped.rstrip(), len(body) - len(stripped) + 1))
    if not lines:
        raise ParseError("missing vertex count", 1, 1)
    no, body, col = lines[0]
    if not body.isdigit():
        raise ParseError(f"vertex count must be a nonnegative integer, got {body!r}", no, col)
    n = int(body)
    m = n * (n - 1) // 2
    rest = lines[1:]
    if n and not rest:
        raise ParseError("missing weight line", no + 1, 1)
    weights: list[Fraction] = []
    if rest:
        no, body, col = rest.pop(0)
        pos = 0
        for tok in body.split():
            pos = body.index(tok, pos)
            try:
                weights.append(parse_rational(tok))
            except ValueError as exc:
                raise ParseError(str(exc), no, col + pos) from None
            pos += len(tok)
        if len(weights) != n:
            raise ParseError(f"expected {n} weights, found {len(weights)}", no, col)
    bitline = ""
    if rest:
        no, bitline, col = rest.pop(0)
    elif m:
        raise ParseError("missing orientation line", (lines[-1][0] + 1), 1)
    for k, ch in enumerate(bitline):
        if ch not in "01":
            raise ParseError(f"orientation characters must be 0 or 1, got {ch!r}", no, col + k)
    if len(bitline) != m:
        raise ParseError(f"expected {m} orientation bits for n={n}, found {len(bitline)}", no, col)
    rest = [r for r in rest if r[1]]
    if rest:
        no, _, col = rest[0]
        raise ParseError("unexpected content after the orientation line", no, col)
    t = Tournament.from_bitstring(bitline) if m else Tournament(n)
    seed = None
    if "seed" in meta:
        try:
            seed = int(meta["seed"])
        except ValueError:
            raise ValidationError(f"seed comment is not an integer: {meta['seed']!r}") from None
    return InstanceFile(WeightedTournament(t, tuple(weights)), meta.get("name"), seed)


def parse_instance(text: str) -> WeightedTournament:
    return parse_instance_file(text).wt


def emit_instance(wt: WeightedTournament) -> str:
    """Canonical text: no comments, shortest exact weights, trailing newline."""
    return f"{wt.n}\n{' '.join(format_rational(x) for x in wt.w)}\n{wt.t.bitstring()}\n"


def emit_instance_file(inst: InstanceFile) -> str:
    head = ""
    if inst.name is not None:
        head += f"# name: {inst.name}\n"
    if inst.seed is not None:
        head += f"# seed: {inst.seed}\n"
    return head + emit_instance(inst.wt)


def instance_hash(wt: WeightedTournament) -> str:
    """sha256 of the canonical emission (labelled: relabelled copies hash differently)."""
    return hashlib.sha256(emit_instance(wt).encode()).hexdigest()


def canonical_hex(t: Tournament) -> str | None:
    return canonical_form(t).hex() if t.n <= CANONICAL_MAX_N else None


@dataclass
class RunReport:
    algorithm: str
    instance: WeightedTournament
    chosen: list[int]
    weight: Fraction
    config: dict[str, Any]
    certificate: list[int] = field(default_factory=list)
    bounds: dict[str, Any] = field(default_factory=dict)
    ratios: dict[str, Any] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)
    stats: dict[str, Any] = field(default_factory=dict)
    trace: dict | None = None

    def to_json(self) -> dict:
        doc = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "algorithm": self.algorithm,
            "instance_hash": instance_hash(self.instance),
            "canonical_form": canonical_hex(self.instance.t),
            "instance": emit_instance(self.instance),
            "chosen": sorted(self.chosen),
            "weight": format_rational(self.weight),
            "certificate": list(self.certificate),
            "bounds": _jsonable(self.bounds),
            "ratios": _jsonable(self.ratios),
            "timings": dict(self.timings),
            "config": dict(self.config),
            "stats": _jsonable(self.stats),
            "trace": self.trace,
        }
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "RunReport":
        validate_report(doc)
        wt = parse_instance(doc["instance"])
        if instance_hash(wt) != doc["instance_hash"]:
            raise ValidationError("$.instance_hash: does not match the embedded instance")
        if any(v >= wt.n for v in doc["chosen"]):
            raise ValidationError(f"$.chosen: vertex out of range for n={wt.n}")
        res = verify_fvs(wt, doc["chosen"])
        if not isinstance(res, FvsSolution):
            raise ValidationError(f"$.chosen: not a feedback vertex set, triangle {tuple(res.triangle)} survives")
        if res.weight != parse_rational(doc["weight"]):
            raise ValidationError(f"$.weight: {doc['weight']} differs from the chosen set's weight {res.weight}")
        bounds = dict(doc.get("bounds", {}))
        if bounds.get("exact") is not None:
            bounds["exact"] = parse_rational(bounds["exact"])
        ratios = dict(doc.get("ratios", {}))
        if "guarantee" in ratios:
            ratios["guarantee"] = parse_rational(ratios["guarantee"])
        return cls(
            doc["algorithm"], wt, list(doc["chosen"]), parse_rational(doc["weight"]), dict(doc["config"]),
            list(doc.get("certificate", [])), bounds, ratios, dict(doc.get("timings", {})),
            dict(doc.get("stats", {})), doc.get("trace"),
        )


def _jsonable(d: dict) -> dict:
    return {k: format_rational(v) if isinstance(v, Fraction) else v for k, v in d.items()}


def report_schema() -> dict:
    return json.loads(resources.files("fvst").joinpath("schemas/report.schema.json").read_text())


def validate_report(doc: Any) -> None:
    """Raise :class:`ValidationError` naming the JSON path of the first schema violation."""
    validator = jsonschema.Draft202012Validator(report_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)
        raise ValidationError(f"{path}: {err.message}")


def write_report(report: RunReport) -> bytes:
    doc = report.to_json()
    validate_report(doc)
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode()


def read_report(data: bytes | str) -> RunReport:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"report is not JSON: {exc}") from None
    return RunReport.from_json(doc)
