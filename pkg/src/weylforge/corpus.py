"""The shipped fixture corpus: transcribed pairs, tuples, matrices and words.

Each JSON record names what it holds and the runner picks the checks from
the fields that are present:

* ``p``/``q`` (a pair in A_1): the pair condition, and when given the
  condition (iii) ``matrix``, its ``inverse``, an elementary ``word`` and the
  ``inverse_images`` of the automorphism.
* ``tuple`` (in CSD_n): the skew relations, the linear ``rank`` and
  ``inverse_images``.
* ``family``: a closed-form family over a range of sizes, together with its
  adjugate matrix inverse and its closed-form word.
* ``upsilon``: the scaling automorphism and its four-letter word.

Values are instantiated at each parameter set in ``params``.  ``where`` lists
abbreviations evaluated in order.  ``corrections`` replaces printed entries
that do not satisfy their own checks; :func:`run_record` applies them unless
asked for the printed text.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .algebra import WEYL, Signature
from .cli.parser import parse_coefficient, parse_expression
from .coeffring import substitute_coeff
from .dixmier import check_dixmier_pair, check_skew_tuple, family_instantiate
from .matrixalg import NCMatrix, build_condition_iii_matrix, family_matrices, mat_mul, recover_generators
from .morphism import (
    ElementaryWord, Endomorphism, endo_compose, is_identity, linear_part_rank, table1_word,
    table2_word, upsilon, upsilon_word, verify_factorization, word_evaluate,
)

FIXTURE_DIR = Path(__file__).with_name("fixtures")


class FixtureError(ValueError):
    """A record is malformed or cannot be instantiated at a parameter set."""


@dataclass
class RecordResult:
    id: str
    checks: list = field(default_factory=list)  # (name, passed) pairs

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(ok for _, ok in self.checks)

    def failures(self) -> list[str]:
        return [name for name, ok in self.checks if not ok]

    def to_json(self) -> dict:
        return {"id": self.id, "passed": self.passed,
                "checks": [{"name": n, "passed": ok} for n, ok in self.checks]}


def load_corpus(paths: Iterable[Path] | None = None) -> list[dict]:
    """All records, in file-name order and then file order."""
    if paths is None:
        paths = sorted(FIXTURE_DIR.glob("*.json"))
    records = []
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            records.extend(json.load(fh))
    return records


def find_record(record_id: str, records: Sequence[dict] | None = None) -> dict:
    for r in records if records is not None else load_corpus():
        if r["id"] == record_id:
            return r
    raise KeyError(f"no fixture with id {record_id!r}")


# -- instantiation ---------------------------------------------------------

def evaluate_where(where: Sequence, env: Mapping, overrides: Mapping | None = None) -> dict:
    env = dict(env)
    overrides = overrides or {}
    for name, text in where:
        env[name] = substitute_coeff(parse_coefficient(overrides.get(name, text)), env)
    return env


def signature_for(algebra: Mapping, env: Mapping) -> Signature:
    if algebra.get("type", "weyl") == "weyl":
        return WEYL
    n = algebra["n"]
    d = {}
    for key, text in algebra["d"].items():
        i, j = int(key[0]), int(key[1:])
        d[(i, j)] = substitute_coeff(parse_coefficient(text), env)
    return Signature.csd(n, d)


class Instance:
    """One record at one parameter set (``params`` may be empty: symbolic)."""

    def __init__(self, record: Mapping, params: Mapping, corrected: bool = True):
        self.record = record
        fixes = record.get("corrections", {}) if corrected else {}
        self.fixes = fixes
        base = {k: parse_coefficient(str(v)) for k, v in params.items()}
        try:
            self.env = evaluate_where(record.get("where", []), base, fixes.get("where"))
            self.sig = signature_for(record.get("algebra", {}), self.env)
        except ZeroDivisionError as exc:
            raise FixtureError(f"{record['id']}: a denominator vanishes at {dict(params)}") from exc
        self.base = base

    def poly(self, text: str, env: Mapping | None = None):
        try:
            return parse_expression(text, self.sig).substitute(self.env if env is None else env)
        except ZeroDivisionError as exc:
            raise FixtureError(f"{self.record['id']}: a denominator vanishes in {text!r}") from exc

    def polys(self, key: str, env: Mapping | None = None) -> list:
        texts = list(self.record[key])
        for idx, text in self.fixes.get(key, {}).items():
            texts[int(idx)] = text
        return [self.poly(t, env) for t in texts]

    def matrix(self, key: str, where_key: str | None = None) -> NCMatrix:
        env = self.env
        if where_key:
            env = evaluate_where(self.record.get(where_key, []), env)
        return NCMatrix([[self.poly(e, env) for e in row] for row in self.record[key]], self.sig)

    def word(self) -> ElementaryWord:
        text = self.fixes.get("word", self.record["word"])
        env = evaluate_where(self.record.get("word_where", []), self.env, self.fixes.get("where"))
        try:
            return ElementaryWord.parse(text).substitute(env)
        except ZeroDivisionError as exc:
            raise FixtureError(f"{self.record['id']}: a word coefficient has a vanishing denominator") from exc

    def inverse_images(self) -> Endomorphism:
        env = evaluate_where(self.record.get("inverse_where", []), self.env, self.fixes.get("where"))
        return Endomorphism(self.sig, self.polys("inverse_images", env))


# -- checks ----------------------------------------------------------------

def _round_trip(e: Endomorphism, inv: Endomorphism) -> bool:
    if not inv.well_defined:
        return False
    return is_identity(endo_compose(e, inv)) and is_identity(endo_compose(inv, e))


def _matrix_inverse(M: NCMatrix, N: NCMatrix) -> bool:
    return mat_mul(M, N).is_identity() and mat_mul(N, M).is_identity()


def _check_pair(inst: Instance, tag: str, checks: list) -> None:
    r = inst.record
    p, q = inst.poly(r["p"]), inst.poly(r["q"])
    checks.append((f"{tag} dixmier", check_dixmier_pair(p, q)))
    e = Endomorphism.from_pair(p, q)
    if "matrix" in r:
        M = inst.matrix("matrix")
        checks.append((f"{tag} matrix", build_condition_iii_matrix(p, q) == M))
        if "inverse" in r:
            N = inst.matrix("inverse")
            checks.append((f"{tag} inverse", _matrix_inverse(M, N)))
            try:
                recover_generators(p, q, N)
                checks.append((f"{tag} recover", True))
            except ValueError:
                checks.append((f"{tag} recover", False))
    if "word" in r:
        checks.append((f"{tag} word", verify_factorization(inst.word(), e)))
    if "inverse_images" in r:
        checks.append((f"{tag} inverse images", _round_trip(e, inst.inverse_images())))


def _check_tuple(inst: Instance, tag: str, checks: list) -> None:
    r = inst.record
    ps = inst.polys("tuple")
    checks.append((f"{tag} skew", check_skew_tuple(ps, inst.sig)))
    e = Endomorphism(inst.sig, ps)
    if "rank" in r:
        rank, _ = linear_part_rank(e)
        checks.append((f"{tag} rank", rank == r["rank"]))
    if "inverse_images" in r:
        checks.append((f"{tag} inverse images", _round_trip(e, inst.inverse_images())))


def _family_word(family: str, index: int, params: Mapping) -> ElementaryWord:
    table, case = family.split(".case")
    build = table1_word if table == "table1" else table2_word
    return build(int(case), index, params)


def _check_family(r: Mapping, params: Mapping, tag: str, checks: list) -> None:
    family = r["family"]
    lo, hi = r["indices"]
    values = {k: parse_coefficient(str(v)) for k, v in params.items()}
    for index in range(lo, hi + 1):
        p, q = family_instantiate(family, values, index=index)
        sub = f"{tag} index {index}"
        checks.append((f"{sub} dixmier", check_dixmier_pair(p, q)))
        M, N = family_matrices(family, values, index=index)
        checks.append((f"{sub} inverse", _matrix_inverse(M, N)))
        try:
            recover_generators(p, q, N)
            checks.append((f"{sub} recover", True))
        except ValueError:
            checks.append((f"{sub} recover", False))
        word = _family_word(family, index, values)
        checks.append((f"{sub} word", verify_factorization(word, Endomorphism.from_pair(p, q))))


def _check_upsilon(r: Mapping, checks: list) -> None:
    for text in r["mu"]:
        mu = parse_coefficient(text)
        checks.append((f"mu={text} word", verify_factorization(upsilon_word(mu), upsilon(mu))))
        t, x = WEYL.gens()
        images = word_evaluate(upsilon_word(mu)).images
        checks.append((f"mu={text} images", list(images) == [t.scale(mu), x.scale(1 / Fraction(mu))]))


def run_record(record: Mapping, corrected: bool = True, symbolic: bool = False) -> RecordResult:
    """Run every check the record supports at each of its parameter sets.

    ``symbolic`` adds a run with the parameters left as symbols (only for
    records that do not pin their algebra constants to numbers).
    """
    result = RecordResult(record["id"])
    kind = record["kind"]
    if kind == "upsilon":
        _check_upsilon(record, result.checks)
        return result
    sets = list(enumerate(record.get("params", [])))
    if kind == "family":
        for k, params in sets:
            _check_family(record, params, f"set {k}", result.checks)
        return result
    runs = [(f"set {k}", params) for k, params in sets]
    if symbolic:
        runs.append(("symbolic", {}))
    for tag, params in runs:
        inst = Instance(record, params, corrected)
        if kind == "pair":
            _check_pair(inst, tag, result.checks)
        elif kind == "tuple":
            _check_tuple(inst, tag, result.checks)
        else:
            raise FixtureError(f"unknown fixture kind {kind!r}")
    return result


def run_corpus(records: Sequence[dict] | None = None, corrected: bool = True,
               ids: Sequence[str] | None = None) -> list[RecordResult]:
    records = load_corpus() if records is None else records
    if ids:
        wanted = set(ids)
        records = [r for r in records if r["id"] in wanted]
    return [run_record(r, corrected) for r in records]
