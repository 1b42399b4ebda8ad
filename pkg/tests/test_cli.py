"""Command-line surface: flags, JSON I/O, exit codes, determinism."""

import json
import random

from multifaced.cli import main
from multifaced.cumulants import random_table, table_to_json


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestEnumerate:
    def test_plain(self, capsys):
        code, out, _ = run(capsys, "enumerate", "--word", "wbb")
        assert code == 0
        data = json.loads(out)
        assert data["count"] == 5

    def test_class_filter(self, capsys):
        code, out, _ = run(capsys, "enumerate", "--word", "wbwb", "--class", "NC")
        data = json.loads(out)
        assert data["count"] == 14  # Catalan(4)

    def test_unknown_class(self, capsys):
        code, _, err = run(capsys, "enumerate", "--word", "wb", "--class", "XX")
        assert code == 1 and "unknown class" in err


class TestMember:
    def test_true(self, capsys):
        code, out, _ = run(capsys, "member", "--class", "I", "--partition", "wb/1|2", "--pretty")
        assert code == 0 and out.strip() == "true"

    def test_json_output(self, capsys):
        code, out, _ = run(capsys, "member", "--class", "biNC", "--partition", "wbwb/13|24")
        assert json.loads(out)["member"] is True

    def test_malformed_partition(self, capsys):
        code, _, err = run(capsys, "member", "--class", "I", "--partition", "wb/13")
        assert code == 1


class TestCheckAdmissible:
    def test_class_family_passes(self, capsys):
        code, out, _ = run(
            capsys,
            "check-admissible",
            "--family",
            '{"kind": "class", "class": "pNC"}',
            "--max-legs",
            "4",
        )
        assert code == 0 and json.loads(out)["pass"] is True

    def test_family_file(self, capsys, tmp_path):
        path = tmp_path / "fam.json"
        path.write_text(json.dumps({"kind": "deformed", "base": "bifree", "zeta": {"re": 0, "im": 1}}))
        code, out, _ = run(capsys, "check-admissible", "--family", str(path), "--max-legs", "4")
        assert code == 0 and json.loads(out)["pass"] is True

    def test_failing_family_exits_two(self, capsys):
        # a table family violating the two-leg condition
        from multifaced.partitions import all_words, enumerate_partitions

        entries = []
        for n in (1, 2):
            for word in all_words("wb", n):
                for p in enumerate_partitions(word):
                    value = 0.5 if (n == 2 and p.block_count == 2) else 1.0
                    entries.append({"partition": str(p), "value": {"re": value, "im": 0}})
        fam = {"kind": "table", "max_legs": 2, "entries": entries}
        code, out, _ = run(capsys, "check-admissible", "--family", json.dumps(fam), "--max-legs", "2")
        assert code == 2
        data = json.loads(out)
        assert data["pass"] is False and data["conditions"]["ii"] is not None

    def test_table_family_missing_entries(self, capsys):
        # an explicit table that stops at two legs cannot be checked at four
        fam = {"kind": "table", "max_legs": 2, "entries": [
            {"partition": "ww/12", "value": {"re": 1, "im": 0}},
        ]}
        code, _, err = run(capsys, "check-admissible", "--family", json.dumps(fam), "--max-legs", "4")
        assert code == 1


class TestClosure:
    def test_interval_closure(self, capsys):
        code, out, _ = run(
            capsys, "closure", "--generators", '{"generators": []}', "--max-legs", "3"
        )
        data = json.loads(out)
        assert code == 0
        # interval partitions with <= 3 legs over two faces: 2 + 8 + 32
        assert data["count"] == 42


class TestClassify:
    def test_binc_pattern(self, capsys):
        code, out, _ = run(
            capsys,
            "classify",
            "--basic",
            '{"nu_w":1,"nu_b":1,"nu_wb":0,"xi_w":0,"xi_b":0,"xi_wb":1}',
        )
        assert code == 0 and json.loads(out) == {"result": "class", "class": "biNC"}

    def test_deformed(self, capsys):
        code, out, _ = run(
            capsys,
            "classify",
            "--basic",
            '{"nu_w":1,"nu_b":1,"nu_wb":{"re":0,"im":-1},"xi_w":1,"xi_b":1,"xi_wb":{"re":0,"im":-1}}',
        )
        data = json.loads(out)
        assert data["result"] == "deformed" and data["base"] == "tensor"
        assert abs(data["zeta"]["im"] - 1.0) < 1e-9

    def test_none(self, capsys):
        code, out, _ = run(
            capsys,
            "classify",
            "--basic",
            '{"nu_w":0,"nu_b":1,"nu_wb":1,"xi_w":0,"xi_b":0,"xi_wb":0}',
        )
        assert json.loads(out) == {"result": "none"}


class TestHasse:
    def test_writes_dot(self, capsys, tmp_path):
        dot = tmp_path / "h.dot"
        code, out, _ = run(capsys, "hasse", "--max-legs", "4", "--dot", str(dot))
        assert code == 0
        data = json.loads(out)
        assert len(data["edges"]) == 17 and data["violations"] == []
        assert dot.read_text().startswith("digraph hasse {")


def make_query(tmp_path):
    r = random.Random(5)
    ga = (("w", "a1w"), ("b", "a2b"), ("w", "a3w"))
    gb = (("b", "b1b"), ("b", "b2b"))
    phi, psi = random_table(ga, 5, r), random_table(gb, 5, r)
    query = {
        "family": {"kind": "class", "class": "NCwAb"},
        "factors": [table_to_json(phi), table_to_json(psi)],
        "word": [
            {"factor": 1, "face": "w", "name": "a1w"},
            {"factor": 2, "face": "b", "name": "b1b"},
            {"factor": 1, "face": "b", "name": "a2b"},
            {"factor": 1, "face": "w", "name": "a3w"},
            {"factor": 2, "face": "b", "name": "b2b"},
        ],
    }
    path = tmp_path / "query.json"
    path.write_text(json.dumps(query))
    return path, phi, psi


class TestProduct:
    def test_value_and_combinatorial(self, capsys, tmp_path):
        path, phi, psi = make_query(tmp_path)
        code, out, _ = run(capsys, "product", "--query", str(path), "--combinatorial")
        assert code == 0
        data = json.loads(out)
        assert data["cross_check"] is True
        a12 = phi.value((("w", "a1w"), ("b", "a2b")))
        a3 = phi.value((("w", "a3w"),))
        a123 = phi.value((("w", "a1w"), ("b", "a2b"), ("w", "a3w")))
        b12 = psi.value((("b", "b1b"), ("b", "b2b")))
        b1 = psi.value((("b", "b1b"),))
        b2 = psi.value((("b", "b2b"),))
        want = a12 * a3 * b12 + a123 * b1 * b2 - a12 * a3 * b1 * b2
        assert abs(complex(data["value"]["re"], data["value"]["im"]) - want) < 1e-9

    def test_explain(self, capsys, tmp_path):
        path, _, _ = make_query(tmp_path)
        code, out, _ = run(capsys, "product", "--query", str(path), "--explain")
        data = json.loads(out)
        assert code == 0 and len(data["expansion"]) == 10

    def test_malformed(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"nope": 1}')
        code, _, err = run(capsys, "product", "--query", str(path))
        assert code == 1


class TestVerifyCommand:
    def test_classification_suite(self, capsys):
        code, out, err = run(capsys, "verify", "--suite", "classification", "--seed", "1")
        assert code == 0
        data = json.loads(out)
        assert data["pass"] is True
        assert err.count("PASS") == len(data["criteria"]) == 4

    def test_determinism(self, capsys):
        _, out1, _ = run(capsys, "enumerate", "--word", "wbwb", "--class", "pNC")
        _, out2, _ = run(capsys, "enumerate", "--word", "wbwb", "--class", "pNC")
        assert out1 == out2


class TestStdinAndWarnings:
    def test_family_from_stdin(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr("sys.stdin", io.StringIO('{"kind": "class", "class": "I"}'))
        code, out, _ = run(capsys, "check-admissible", "--family", "-", "--max-legs", "3")
        assert code == 0 and json.loads(out)["pass"] is True

    def test_large_sweep_warns(self, capsys):
        code, _, err = run(
            capsys, "check-admissible", "--family", '{"kind": "class", "class": "I"}',
            "--max-legs", "7",
        )
        assert code == 0 and "warning" in err
