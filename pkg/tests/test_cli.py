import json
from collections import Counter
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from weylforge.algebra import WEYL, Signature
from weylforge.cli.main import main
from weylforge.cli.parser import MAX_EXPONENT, ParseError, parse_coefficient, parse_expression
from weylforge.cli.printer import format_canonical, format_coefficient
from weylforge.coeffring import CPoly

from oracles import sign_normalized, to_sympy
from strategies import CSD3, cpolys, ncpolys

GOLDEN = Path(__file__).parent / "data" / "dixmier_system_2_2.txt"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestParser:
    def test_reorders_into_standard_form(self):
        assert parse_expression("x*t", WEYL) == WEYL.var("x") * WEYL.var("t")
        assert format_canonical(parse_expression("x*t", WEYL)) == "t*x + 1"

    def test_square(self):
        assert format_canonical(parse_expression("(t+x)^2", WEYL)) == "t^2 + 2*t*x + x^2 + 1"

    def test_rational_scalar(self):
        f = parse_expression("3/2 * t", WEYL)
        assert f == WEYL.const(Fraction(3, 2)) * WEYL.var("t")

    def test_zero_prints_as_zero(self):
        assert format_canonical(parse_expression("t*x - x*t + 1", WEYL)) == "0"

    def test_parameters_become_coefficients(self):
        f = parse_expression("l0*t + l1", WEYL)
        assert f.coefficient((1, 0)) == CPoly.param("l0")
        assert f.coefficient((0, 0)) == CPoly.param("l1")

    def test_csd_variables(self):
        sig = Signature.csd(3, [1, 2, 3])
        f = parse_expression("x3*x1", sig)
        assert format_canonical(f) == "x1*x3 + 2"

    @pytest.mark.parametrize("text", ["t +* x", "t)", "(t", "t $ x", ""])
    def test_syntax_errors_carry_a_position(self, text):
        with pytest.raises(ParseError) as info:
            parse_expression(text, WEYL)
        assert info.value.position is not None

    def test_exponent_limit(self):
        with pytest.raises(ParseError, match="exponent"):
            parse_expression(f"t^{MAX_EXPONENT + 1}", WEYL)

    def test_division_by_variable(self):
        with pytest.raises(ParseError):
            parse_expression("1/t", WEYL)

    def test_division_by_zero(self):
        with pytest.raises(ParseError):
            parse_expression("t/0", WEYL)

    @pytest.mark.parametrize("name", ["x4", "t", "x"])
    def test_unknown_variable_of_the_algebra(self, name):
        with pytest.raises(ParseError, match="unknown identifier"):
            parse_expression(f"x1 + {name}", CSD3)

    def test_coefficient_parser(self):
        c = parse_coefficient("(a + 1)^2 - a^2")
        assert c == 2 * CPoly.param("a") + 1


class TestRoundTrip:
    @given(ncpolys())
    def test_weyl(self, f):
        assert parse_expression(format_canonical(f), WEYL) == f

    @given(ncpolys(sig=CSD3))
    def test_csd3(self, f):
        assert parse_expression(format_canonical(f), CSD3) == f

    @given(ncpolys(coeffs=cpolys(max_degree=2, max_terms=3)))
    def test_symbolic_coefficients(self, f):
        assert parse_expression(format_canonical(f), WEYL) == f

    @given(cpolys())
    def test_coefficients(self, c):
        assert parse_coefficient(format_coefficient(c)) == c

    @given(st.sampled_from(["x1*x2", "x2*x1", "x3^2*x1", "(x1+x3)^3"]))
    def test_printing_is_idempotent(self, text):
        once = format_canonical(parse_expression(text, CSD3))
        assert format_canonical(parse_expression(once, CSD3)) == once


class TestCommands:
    def test_verify_pair_true(self, capsys):
        code, out, _ = run(capsys, "verify-pair", "--p", "t", "--q", "t+x")
        assert code == 0
        assert out.strip() == "DIXMIER"

    def test_verify_pair_false_shows_residual(self, capsys):
        code, out, _ = run(capsys, "verify-pair", "--p", "t^2", "--q", "t+x")
        assert code == 1
        assert "NOT DIXMIER" in out
        assert "[q,p] = 2*t" in out

    def test_commutator_csd(self, capsys):
        code, out, _ = run(capsys, "commutator", "--algebra", "csd3", "--d", "1,2,3",
                           "--f", "x2", "--g", "x1")
        assert code == 0
        assert out.strip() == "1"

    def test_gen_system_matches_golden(self, capsys):
        code, out, _ = run(capsys, "gen-system", "--n", "2", "--m", "2", "--json")
        assert code == 0
        payload = json.loads(out)
        assert len(payload["equations"]) == 15
        golden = [l for l in GOLDEN.read_text().splitlines() if l and not l.startswith("#")]
        ours = Counter(str(sign_normalized(to_sympy(e))) for e in payload["equations"])
        theirs = Counter(str(sign_normalized(to_sympy(e))) for e in golden)
        assert ours == theirs

    @pytest.mark.parametrize("argv", [
        ["gen-system", "--n", "2", "--m", "1", "--json"],
        ["endo-invert", "--image", "t + x^2", "--image", "x", "--bounds", "2", "--json"],
        ["word-eval", "--word", "Phi(2, l0) Psi(1, l1)", "--json"],
    ])
    def test_json_is_byte_stable(self, capsys, argv):
        first = run(capsys, *argv)[1]
        second = run(capsys, *argv)[1]
        assert first == second
        json.loads(first)

    def test_endo_invert_found(self, capsys):
        code, out, _ = run(capsys, "endo-invert", "--image", "t + x^2", "--image", "x",
                           "--bounds", "2", "--json")
        assert code == 0
        assert json.loads(out)["images"] == {"t": "-x^2 + t", "x": "x"}

    def test_endo_invert_not_found_is_unknown(self, capsys):
        code, out, _ = run(capsys, "endo-invert", "--image", "t + x^3", "--image", "x",
                           "--bounds", "1")
        assert code == 3
        assert "NOT FOUND" in out

    def test_groebner(self, capsys):
        code, out, _ = run(capsys, "groebner", "--poly", "x^2 + y^2 - 1", "--poly", "x - y",
                           "--vars", "x,y", "--json")
        assert code == 0
        assert json.loads(out)["basis"] == ["y^2 - 1/2", "x - y"]

    def test_groebner_cap_is_unknown(self, capsys, monkeypatch):
        monkeypatch.setenv("WEYLFORGE_GROEBNER_CAPS", "1,2")
        code, out, _ = run(capsys, "groebner", "--poly", "x^3 - 2*x*y",
                           "--poly", "x^2*y - 2*y^2 + x", "--vars", "x,y")
        assert code == 3
        assert out.startswith("UNKNOWN")

    def test_solve_factorization(self, capsys):
        code, out, _ = run(capsys, "solve-factorization", "--template", "Phi(1, u1)",
                           "--p", "t + 2*x", "--q", "x", "--json")
        assert code == 0
        assert json.loads(out)["assignment"] == {"u1": "2"}

    def test_fixtures_run(self, capsys):
        code, out, _ = run(capsys, "fixtures", "run")
        assert code == 0
        assert out.strip().splitlines()[-1].endswith("fixtures pass")

    def test_fixtures_printed_values_fail(self, capsys):
        code, out, _ = run(capsys, "fixtures", "run", "--printed", "--id", "table3.n3.case1")
        assert code == 1
        assert out.startswith("FAIL")


class TestErrors:
    def test_parse_error_exit_code(self, capsys):
        code, _, err = run(capsys, "verify-pair", "--p", "t +* x", "--q", "x")
        assert code == 2
        assert err.startswith("error:")

    def test_parse_error_json(self, capsys):
        code, out, _ = run(capsys, "verify-pair", "--p", "t^", "--q", "x", "--json")
        assert code == 2
        assert "error" in json.loads(out)

    def test_missing_argument(self, capsys):
        assert run(capsys, "verify-pair", "--p", "t")[0] == 2

    def test_unknown_command(self, capsys):
        assert run(capsys, "frobnicate")[0] == 2

    def test_bad_algebra(self, capsys):
        assert run(capsys, "commutator", "--algebra", "csd1", "--f", "x1", "--g", "x1")[0] == 2

    def test_wrong_number_of_images(self, capsys):
        assert run(capsys, "endo-check", "--image", "t")[0] == 2

    def test_unknown_fixture(self, capsys):
        assert run(capsys, "fixtures", "run", "--id", "no.such.record")[0] == 2
