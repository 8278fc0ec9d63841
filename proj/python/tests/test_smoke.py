import json
import math
import pathlib
from fractions import Fraction

import pytest

import freewalk

DATA = pathlib.Path(__file__).resolve().parents[2] / "data"


def test_kak_real_diagonal():
    c = freewalk.kak([[0.5, 0], [0, 2]])
    assert c["a"] == pytest.approx([2.0, 0.5])


def test_kak_padic_exact():
    c = freewalk.kak([[Fraction(1, 9), 0], [0, 9]], p=3)
    assert c["a"] == [Fraction(1, 9), Fraction(9)]
    assert all(isinstance(x, Fraction) for row in c["k"] for x in row)


def test_iwasawa_unitriangular():
    w = freewalk.iwasawa([[2, 1], [1, 1]])
    assert w["n"][0][0] == pytest.approx(1.0)
    assert w["n"][1][0] == 0.0


def test_non_unimodular_is_rejected():
    with pytest.raises(RuntimeError):
        freewalk.kak([[2, 0], [0, 1]])


def test_certify_and_oracle():
    gens = json.loads((DATA / "generators" / "diag_conjugate.json").read_text())["generators"]
    assert freewalk.certify(gens, 0.5, 0.02, exact=True)["certified"]
    assert freewalk.free_word_oracle(gens, 6) == (False, "")

    non_free = json.loads((DATA / "generators" / "non_free.json").read_text())["generators"]
    found, word = freewalk.free_word_oracle(non_free, 12)
    assert found and word
    assert "aBaaBaaBaaBa" in freewalk.find_relations(non_free, 12)
    assert not freewalk.certify(non_free, 0.5, 0.1)["certified"]


def test_lyapunov_diag2():
    est = freewalk.lyapunov([[[2, 0], [0, Fraction(1, 2)]]], [1], n=50, reps=10, seed=1)
    assert est["lambda1"]["mean"] == pytest.approx(math.log(2), abs=1e-8)
    assert est["lambda1"]["sd"] == 0


def test_philox_matches_reference():
    # Random123 known-answer vector
    assert freewalk.philox4x32_10([0, 0, 0, 0], [0, 0]) == [0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8]


def test_run_config(tmp_path):
    res = freewalk.run_config(str(DATA / "configs" / "lyapunov_diag2.json"), threads=2, out=str(tmp_path))
    rows = (tmp_path / "lyapunov.csv").read_text().splitlines()
    assert rows[0].startswith("quantity,estimate")
    assert res["out"] == str(tmp_path)
