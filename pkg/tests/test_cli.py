import json
import random
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wildcovers import codec
from wildcovers.arith import GF
from wildcovers.cli import main
from wildcovers.curves import EllipticFunction, EllipticMarkedCurve, elliptic_verdict
from wildcovers.errors import ParseError
from wildcovers.series import LaurentSeries
from wildcovers.unipotent import FqRing, LaurentRing, UnipotentMatrix, positions


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def series_of(obj):
    return codec.series_from_json(obj)


# -- wp-solve ----------------------------------------------------------------

def test_wp_solve_t_over_f2(capsys):
    code, out, _ = run(capsys, "wp-solve", "--p", "2", "--json", '{"terms": {"1": 1}, "prec": 40}')
    assert code == 0 and out["solvable"] and out["verified"]
    b = series_of(out["b"])
    assert b.terms() == {k: GF(2).one for k in (1, 2, 4, 8, 16, 32)}


def test_wp_solve_zero_and_pole(capsys):
    code, out, _ = run(capsys, "wp-solve", "--p", "2", "--json", '{"coeffs": [], "prec": 10}')
    assert code == 0 and out["solvable"] and series_of(out["b"]).is_zero()
    code, out, _ = run(capsys, "wp-solve", "--p", "2", "--json", '{"terms": {"-1": 1}, "prec": 10}')
    assert code == 0 and out == {"solvable": False, "b": None}


def test_wp_solve_over_extension_and_exact_input(capsys):
    code, out, _ = run(capsys, "wp-solve", "--p", "2", "--ext-degree", "2",
                       "--json", '{"terms": {"0": [1, 0], "3": [0, 1]}}', "--prec", "20")
    assert code == 0 and out["solvable"]
    assert series_of(out["b"]).prec == 20


def test_parse_errors(capsys, tmp_path):
    assert run(capsys, "wp-solve", "--p", "2", "--json", "{not json")[0] == 2
    assert run(capsys, "wp-solve", "--p", "2", "--json", '{"coeffs": 5}')[0] == 2
    assert run(capsys, "wp-solve", "--p", "2")[0] == 2
    assert run(capsys, "wp-solve", "--p", "2", "--in", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "no-such-command")[0] == 2


def test_domain_errors(capsys):
    assert run(capsys, "wp-solve", "--p", "4", "--json", '{"coeffs": [1]}')[0] == 3
    assert run(capsys, "elliptic-analyze", "--p", "5", "--A", "0", "--B", "0")[0] == 3
    assert run(capsys, "orbits", "--n", "5", "--p", "5")[0] == 3
    code, _, err = run(capsys, "elliptic-analyze", "--p", "3", "--A", "1", "--B", "0")
    assert code == 3 and json.loads(err)["error"] == "UsageError"


def test_input_file_and_out(capsys, tmp_path):
    src = tmp_path / "in.json"
    dst = tmp_path / "out.json"
    src.write_text(json.dumps({"field": {"p": 3, "modulus": [0, 1]}, "terms": {"3": 1}, "prec": 30}))
    code, out, _ = run(capsys, "wp-solve", "--in", str(src), "--out", str(dst))
    assert code == 0 and out is None
    result = json.loads(dst.read_text())
    assert series_of(result["b"]).terms() == {3: GF(3)(2), 9: GF(3)(2), 27: GF(3)(2)}


# -- split and reduce ----------------------------------------------------------

def test_split_p1_and_elliptic(capsys):
    code, out, _ = run(capsys, "split", "--p", "3", "--json", '{"terms": {"-2": 1, "2": 1}, "prec": 30}')
    assert code == 0 and out["verified"]
    assert series_of(out["h"]) == LaurentSeries.monomial(GF(3), 1, -2)
    code, out, _ = run(capsys, "split", "--model", '{"p": 5, "A": 1, "B": 0}',
                       "--json", '{"field": 5, "terms": {"-1": 1}, "prec": 20}')
    assert code == 0 and out["obstruction"] == 0 and out["verified"]
    code, out, _ = run(capsys, "split", "--model", '{"p": 5, "A": 3, "B": 2}',
                       "--json", '{"field": 5, "terms": {"-1": 1}, "prec": 20}')
    assert code == 0 and out["obstruction"] == 1


def test_reduce_p1_entry_t(capsys):
    payload = {"n": 2, "ring": "laurent", "field": {"p": 2, "modulus": [0, 1]},
               "entries": {"1,2": {"terms": {"1": 1}, "prec": 40}}}
    code, out, _ = run(capsys, "reduce", "--model", "p1", "--json", json.dumps(payload))
    assert code == 0 and out["verified"]
    Mg = codec.matrix_from_json(out["M_prime"])
    assert Mg.is_identity()


def test_reduce_global_input(capsys):
    payload = {"n": 3, "ring": "laurent", "field": 3,
               "entries": {"1,2": {"terms": {"-2": 1}}, "1,3": {"terms": {"0": 2}}}}
    code, out, _ = run(capsys, "reduce", "--json", json.dumps(payload))
    assert code == 0
    assert codec.matrix_from_json(out["B"]).is_identity()


def test_reduce_anomalous_exit_4(capsys, tmp_path):
    payload = {"n": 2, "ring": "laurent", "field": 5, "entries": {"1,2": {"terms": {"-1": 1}, "prec": 40}}}
    dst = tmp_path / "w.json"
    code, _, err = run(capsys, "reduce", "--model", '{"p": 5, "A": 3, "B": 2}',
                       "--json", json.dumps(payload), "--out", str(dst))
    assert code == 4
    assert json.loads(err)["witness"] == {"entry": "1,2", "obstruction": 1}
    assert json.loads(dst.read_text())["witness"]["entry"] == "1,2"


def test_reduce_elliptic_success(capsys):
    payload = {"n": 2, "ring": "laurent", "field": 5, "entries": {"1,2": {"terms": {"-1": 1, "3": 2}, "prec": 40}}}
    code, out, _ = run(capsys, "reduce", "--model", '{"p": 5, "A": 1, "B": 0}', "--json", json.dumps(payload))
    assert code == 0 and out["verified"] and out["M_prime"]["ring"] == "elliptic"


def test_random_matrix_feeds_reduce(capsys):
    code, M, _ = run(capsys, "random-matrix", "--n", "3", "--p", "3", "--seed", "4", "--pole", "6")
    assert code == 0
    code2, M2, _ = run(capsys, "random-matrix", "--n", "3", "--p", "3", "--seed", "4", "--pole", "6")
    assert M == M2
    code, out, _ = run(capsys, "reduce", "--json", json.dumps(M))
    assert code == 0 and out["verified"]


# -- equivalence, orbits, sections ---------------------------------------------

def _m2(field, v):
    return {"n": 2, "ring": "fq", "field": field, "entries": {"1,2": v}}


def test_equiv_examples(capsys):
    F2 = {"p": 2, "modulus": [0, 1]}
    F4 = {"p": 2, "modulus": [1, 1, 1]}
    code, out, _ = run(capsys, "equiv", "--json", json.dumps({"M": _m2(F2, 1), "M_prime": _m2(F2, 1)}))
    assert code == 0 and out["equivalent"] and codec.matrix_from_json(out["C"]).is_identity()
    code, out, _ = run(capsys, "equiv", "--json", json.dumps({"M": _m2(F2, 1), "M_prime": _m2(F2, 0)}))
    assert code == 0 and out == {"equivalent": False, "C": None}
    code, out, _ = run(capsys, "equiv", "--json", json.dumps({"M": _m2(F4, [1, 0]), "M_prime": _m2(F4, [0, 0])}))
    assert code == 0 and out["equivalent"]
    assert out["C"]["entries"]["1,2"] == [0, 1]


def test_equiv_unsupported_ring(capsys):
    bad = {"n": 2, "ring": "matrix", "field": 2, "entries": {}}
    assert run(capsys, "equiv", "--json", json.dumps({"M": bad, "M_prime": bad}))[0] == 3


@pytest.mark.parametrize("n,p,count", [(2, 2, 2), (3, 2, 5), (2, 3, 3)])
def test_orbits(capsys, n, p, count):
    code, out, _ = run(capsys, "orbits", "--n", str(n), "--p", str(p))
    assert code == 0 and out["class_count"] == count
    assert sum(out["class_sizes"]) == p ** (n * (n - 1) // 2)
    assert len(out["representatives"]) == count


def test_lang_section(capsys):
    code, out, _ = run(capsys, "lang-section", "--json", json.dumps(_m2(2, 1)))
    assert code == 0 and out["verified"] and out["s"] == 2
    assert out["field"]["modulus"] == [1, 1, 1]


@pytest.mark.parametrize("A,B,count,alpha,anomalous", [(1, 0, 4, 2, False), (3, 2, 5, 1, True), (0, 1, 6, 0, False)])
def test_elliptic_analyze(capsys, A, B, count, alpha, anomalous):
    code, out, _ = run(capsys, "elliptic-analyze", "--p", "5", "--A", str(A), "--B", str(B))
    assert code == 0
    assert (out["count"], out["alpha"], out["anomalous"]) == (count, alpha, anomalous)
    assert out["injective"] == out["surjective"] == out["equivalence"] == (alpha != 1)
    code, out2, _ = run(capsys, "elliptic-analyze", "--json", json.dumps({"p": 5, "A": A, "B": B}))
    assert out2 == out


def test_elliptic_analyze_integrity_exit_5(capsys, monkeypatch):
    from wildcovers import curves
    monkeypatch.setattr(curves, "point_count", lambda E: 0)
    assert run(capsys, "elliptic-analyze", "--p", "5", "--A", "1", "--B", "0")[0] == 5


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "wildcovers", "orbits", "--n", "2", "--p", "5"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["class_count"] == 5


def test_stdin_payload():
    proc = subprocess.run([sys.executable, "-m", "wildcovers", "wp-solve", "--p", "2", "--in", "-"],
                          input='{"terms": {"-1": 1}, "prec": 8}', capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["solvable"] is False


# -- round trips ------------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([(2, 1), (2, 2), (3, 2), (5, 1)]), st.booleans())
def test_series_roundtrip(seed, pe, exact):
    F = GF(*pe)
    rng = random.Random(seed)
    lo = rng.randint(-6, 3)
    terms = {k: F.element([rng.randrange(F.p) for _ in range(F.e)]) for k in range(lo, lo + rng.randint(0, 12))}
    s = LaurentSeries.from_terms(F, terms, None if exact else lo + 15)
    assert codec.series_from_json(json.loads(json.dumps(codec.series_to_json(s)))) == s


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from(["fq", "laurent"]))
def test_matrix_roundtrip(seed, tag):
    rng = random.Random(seed)
    F = GF(3, 2)
    ring = FqRing(F) if tag == "fq" else LaurentRing(F)
    M = UnipotentMatrix(3, ring, {pos: ring.random(rng) for pos in positions(3)})
    back = codec.matrix_from_json(json.loads(json.dumps(codec.matrix_to_json(M))))
    assert back == M


def test_elliptic_matrix_and_verdict_roundtrip():
    E = EllipticMarkedCurve(7, 2, 3)
    y = EllipticFunction.monomial(E, 1, 1, 4)
    M = UnipotentMatrix(2, E.global_ring, {(1, 2): y + 2})
    assert codec.matrix_from_json(codec.matrix_to_json(M)) == M
    v = elliptic_verdict(E)
    assert codec.verdict_from_json(codec.verdict_to_json(v)) == v
    assert codec.curve_from_json(codec.curve_to_json(E)) == E
    F = GF(5, 3)
    a = F.element([1, 2, 3])
    assert codec.element_from_json(codec.element_to_json(a)) == a
    assert codec.field_from_json(codec.field_to_json(F)) == F


def test_bare_element_needs_field():
    with pytest.raises(ParseError):
        codec.element_from_json(3)
    with pytest.raises(ParseError):
        codec.element_from_json(True, GF(2))
