import json

import pytest

from hocodim import cli
from hocodim.catalog import builtin_complex, builtin_context, default_quotients
from hocodim.exactla import GF
from hocodim.groups import GroupRingElement, Word
from hocodim.serialize import (
    complex_from_json,
    complex_to_json,
    element_from_json,
    element_to_json,
    group_from_json,
    group_to_json,
    hom_from_json,
    hom_to_json,
    matrix_from_json,
    matrix_to_json,
    quotient_from_json,
    quotient_to_json,
)

EXPERIMENT = {
    "schema": "hocodim/1",
    "command": "cd",
    "groups": {"Z2g": {"generators": ["a", "b"], "relators": ["a b a^-1 b^-1"], "aspherical": True},
               "Z": {"generators": ["t"], "aspherical": True}},
    "complexes": {"T": {"group": "Z2g", "presentation": True, "closed_orientable": True},
                  "S": {"group": "Z", "presentation": True}},
    "homs": {"proj": {"source": "T", "target": "S", "images": ["t", "1"]}},
    "quotients": {"Z4": {"of": "S", "images": [[2, 3, 4, 1]]}},
    "context": "proj",
    "parameters": {"ring": "fp:2", "quotient": "Z4", "family": "trivial,regular,aug:1"},
}


def run(capsys, *argv):
    code = cli.main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def write(tmp_path, doc, name="exp.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(p)


def test_cd_pinch_elementary_quotient(capsys):
    code, out, _ = run(capsys, "cd", "--builtin", "pinch:2", "--quotient", "Z2^2", "--ring", "fp:2", "--json")
    assert code == 0
    rep = json.loads(out)
    (res,) = rep["results"]
    assert res["degree"] == 2 and res["ring"] == "F2" and res["quotient"] == "Z2^2"
    assert rep["witnesses"][0]["module"] == "trivial"
    assert rep["timings"] is None


def test_verify_torus(capsys):
    code, out, _ = run(capsys, "verify", "--builtin", "torus:3")
    assert code == 0 and "status: ok" in out


@pytest.mark.parametrize("name", ["circle", "wedge:2", "wedge:4", "torus:1", "torus:2", "torus:4", "surface:1",
                                  "surface:2", "surface:3", "point", "projection", "inclusion", "pinch:1",
                                  "pinch:3", "power:-3", "power:0", "abelianization", "constant",
                                  "identity:torus:2"])
def test_every_builtin_verifies(capsys, name):
    code, out, _ = run(capsys, "verify", "--builtin", name)
    assert code == 0, out
    assert "FAIL" not in out


def test_parse_error_exit_code(capsys, tmp_path):
    doc = json.loads(json.dumps(EXPERIMENT))
    doc["groups"]["Z2g"]["relators"] = ["a b^"]
    code, _, err = run(capsys, "cd", "--spec", write(tmp_path, doc))
    assert code == 2 and "parse error" in err


@pytest.mark.parametrize("mutate,needle", [
    (lambda d: d.update(schema="hocodim/0"), "schema mismatch"),
    (lambda d: d.update(extra=1), "schema mismatch"),
    (lambda d: d.update(command="hd"), "schema mismatch"),
    (lambda d: d["homs"]["proj"].update(target="nowhere"), "unresolved reference"),
    (lambda d: d.update(context="missing"), "unresolved reference"),
])
def test_bad_experiment_files(capsys, tmp_path, mutate, needle):
    doc = json.loads(json.dumps(EXPERIMENT))
    mutate(doc)
    code, _, err = run(capsys, "cd", "--spec", write(tmp_path, doc))
    assert code == 2 and needle in err


def test_invalid_json_and_unknown_builtin(capsys, tmp_path):
    code, _, err = run(capsys, "cd", "--spec", write(tmp_path, "{not json"))
    assert code == 2 and "schema mismatch" in err
    code, _, err = run(capsys, "cd", "--builtin", "klein")
    assert code == 2 and "input error" in err


def test_size_budget_exit_code(capsys):
    code, _, err = run(capsys, "product-check", "--builtin", "pinch:2", "--quotient", "Z2^2",
                       "--ring", "fp:2", "--size-budget", "16")
    assert code == 2 and "size budget exceeded" in err


def test_json_is_deterministic(capsys, tmp_path):
    path = write(tmp_path, EXPERIMENT)
    first = run(capsys, "cd", "--spec", path, "--json")
    second = run(capsys, "cd", "--spec", path, "--json")
    assert first == second and first[0] == 0
    rep = json.loads(first[1])
    assert set(rep) == {"command", "version", "inputs", "results", "witnesses", "certificates", "timings"}
    assert rep["results"][0]["degree"] == 1


def test_timings_only_on_request(capsys):
    code, out, _ = run(capsys, "cd", "--builtin", "projection", "--quotient", "trivial", "--json", "--timings")
    assert code == 0 and json.loads(out)["timings"]["total_seconds"] >= 0


COMMAND_LINES = [
    ("cohomology", "torus:2", ["--ring", "fp:2", "--quotient", "trivial"]),
    ("homology", "surface:2", ["--quotient", "trivial"]),
    ("induced-map", "projection", ["--quotient", "Z2"]),
    ("hd", "pinch:2", ["--quotient", "trivial"]),
    ("certify-upper", "projection", ["--quotient", "trivial"]),
    ("product-check", "projection", ["--ring", "q"]),
    ("field-scan", "power:2", ["--quotient", "Z2"]),
    ("bs-power", "torus:2", ["--quotient", "Z2^2", "--ring", "fp:2"]),
    ("hd-eq-cd", "suite", ["--quotient", "trivial"]),
    ("verify", "suite", []),
]


@pytest.mark.parametrize("command,builtin,extra", COMMAND_LINES, ids=[c[0] for c in COMMAND_LINES])
def test_each_command_runs(capsys, command, builtin, extra):
    code, out, _ = run(capsys, command, "--builtin", builtin, "--json", *extra)
    assert code == 0
    rep = json.loads(out)
    assert rep["command"] == command and rep["results"]


def test_commands_cover_all_runners():
    assert set(cli.RUNNERS) == set(cli.COMMANDS) == {c for c, _, _ in COMMAND_LINES} | {"cd"}


def test_cohomology_of_torus_counts(capsys):
    _, out, _ = run(capsys, "cohomology", "--builtin", "torus:3", "--ring", "fp:2", "--quotient", "trivial",
                    "--json")
    dims = [r["dim"] for r in json.loads(out)["results"]]
    assert dims == [1, 3, 3, 1]


def test_certify_infeasible_level_fails(capsys):
    code, out, _ = run(capsys, "certify-upper", "--builtin", "identity:torus:2", "--quotient", "trivial",
                       "--level", "1", "--json")
    assert code == 1
    rep = json.loads(out)
    assert rep["certificates"] == [] and rep["results"][0]["feasible"] is False


def test_parse_degrees_and_primes():
    assert cli.parse_degrees("1..3", 5) == [1, 2, 3]
    assert cli.parse_degrees(None, 2) == [0, 1, 2]
    assert cli.parse_primes("2,3") == [2, 3]
    with pytest.raises(cli.InputError):
        cli.parse_primes("4")


def test_round_trips():
    for name in ("torus:2", "surface:2", "wedge:2"):
        c = builtin_complex(name)
        g = group_from_json(group_to_json(c.group))
        assert g.generators == c.group.generators and g.relators == c.group.relators
        back = complex_from_json(json.loads(json.dumps(complex_to_json(c))), g)
        assert back.ranks == c.ranks
        assert [d.entries for d in back.boundaries] == [d.entries for d in c.boundaries]
        assert back.edge_generators == c.edge_generators
        for q in default_quotients(c.group).values():
            q2 = quotient_from_json(quotient_to_json(q), g, 64)
            assert q2.generator_images == q.generator_images and q2.order == q.order
    ctx = builtin_context("pinch:2")
    h = hom_from_json(hom_to_json(ctx.hom), ctx.hom.source, ctx.hom.target)
    assert h.images == ctx.hom.images
    grp = ctx.hom.target
    e = GroupRingElement.from_word(Word.gen(0), 3) - GroupRingElement.from_word(Word(), 1)
    assert element_from_json(grp, element_to_json(grp, e)) == e
    m = cli.make_module("aug^2", ctx.quotients["Z3"], GF(3)).matrices[1]
    assert matrix_from_json(GF(3), matrix_to_json(m)) == m
