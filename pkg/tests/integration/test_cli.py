# tests/integration/test_cli.py
import subprocess
import sys

import pytest

from shiftlab import cli
from shiftlab.core.ckalg import edge_isometry, pushforward, theorem813_images
from shiftlab.core.codes import HigherBlockMap
from shiftlab.fileformats import load_graph


# -------------------------------
# Helpers
# -------------------------------
def run_cli(args, capsys):
    """Run CLI main() with given args and capture output + exit code."""
    try:
        code = cli.main(args)
    except SystemExit as e:
        return capsys.readouterr(), e.code
    return capsys.readouterr(), code


def lines(out):
    return out.out.splitlines()


@pytest.fixture
def two_step_file(tmp_path):
    path = tmp_path / "two_step.shift"
    path.write_text("shift forbidden finite:2\nblock a1.a1.a1\nblock a2.a1.a2\n", encoding="utf-8")
    return path


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("SHIFTLAB_HORIZON", "SHIFTLAB_DEPTH", "SHIFTLAB_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)


# -------------------------------
# Shift Commands
# -------------------------------
def test_cli_blocks_of_an_edge_shift(files, capsys):
    out, code = run_cli(
        ["blocks", "--shift", str(files["g1.shift"]), "--n", "2", "--format", "lines"], capsys
    )
    assert code == 0
    assert lines(out) == ["block\te.f", "block\te.g", "block\tf.e", "block\tg.f", "block\tg.g"]


def test_cli_blocks_report_truncation(capsys):
    out, code = run_cli(
        ["blocks", "--shift", "builtin:hub_pairs", "--n", "2", "--horizon", "3"], capsys
    )
    assert code == 0
    assert "partial: truncated at horizon 3" in out.out
    assert "a1.a3" in out.out


@pytest.mark.parametrize("seq,answer", [
    ("a1|(a2)", "yes"),
    ("(a2.a3)", "no"),
    ("(a7)", "yes"),
], ids=["hub-then-constant", "mixed-period", "far-constant"])
def test_cli_member(seq, answer, capsys):
    out, code = run_cli(["member", "--shift", "builtin:ex5_18_pairs", "--seq", seq,
                         "--format", "lines"], capsys)
    assert code == 0
    assert lines(out)[0] == f"membership\t{answer}"


def test_cli_member_lists_extension_symbols(capsys):
    out, code = run_cli(["member", "--shift", "builtin:hub_pairs", "--seq", "a1", "--extend", "4",
                         "--format", "lines"], capsys)
    assert code == 0
    successors = [line for line in lines(out) if line.startswith("successor")]
    assert successors == [f"successor\ta{k}" for k in range(1, 5)]


@pytest.mark.parametrize("shift,kind", [
    ("builtin:ladder", "row-finite-infinite"),
    ("builtin:hub_pairs", "not-row-finite"),
    ("builtin:full", "not-row-finite"),
], ids=["ladder", "hub-pairs", "full"])
def test_cli_classify(shift, kind, capsys):
    out, code = run_cli(["classify", "--shift", shift, "--format", "lines"], capsys)
    assert code == 0
    assert lines(out) == [f"class\t{kind}"]


def test_cli_classify_finite_graph(files, capsys):
    shift = f"edges:{files['g1.graph']}"
    out, code = run_cli(["classify", "--shift", shift, "--format", "lines"], capsys)
    assert code == 0
    assert lines(out) == ["class\tfinite-symbol"]


def test_cli_recode_writes_a_graph(two_step_file, tmp_path, capsys):
    graph_file = tmp_path / "recoded.graph"
    out, code = run_cli([
        "recode", "--shift", str(two_step_file), "--step", "2",
        "--write-graph", str(graph_file), "--format", "lines",
    ], capsys)
    assert code == 0
    records = lines(out)
    assert sum(r.startswith("letter\t") for r in records) == 4
    assert "forbidden\t<a1.a1>.<a1.a1>" in records
    g = load_graph(graph_file)
    assert len(g.vertices()) == 4


def test_cli_higher_block_of_g1(files, tmp_path, capsys):
    graph_file = tmp_path / "hb.graph"
    out, code = run_cli([
        "higher-block", "--shift", str(files["g1.shift"]), "--N", "2",
        "--write-graph", str(graph_file),
    ], capsys)
    assert code == 0
    assert len(load_graph(graph_file).edges()) == 5


def test_cli_higher_block_presentation(capsys):
    out, code = run_cli(["higher-block", "--shift", "builtin:ladder", "--N", "2", "--horizon", "3",
                         "--format", "lines"], capsys)
    assert code == 0
    assert "letter\t<a1.a2>" in lines(out)


# -------------------------------
# Codes
# -------------------------------
def test_cli_compose(files, capsys):
    out, code = run_cli([
        "compose", "--phi", str(files["phi2.blockmap"]), "--psi", str(files["pi2.blockmap"]),
        "--format", "lines",
    ], capsys)
    assert code == 0
    assert "window\t2" in lines(out)


def test_cli_compose_writes_tables(tmp_path, capsys):
    swap = tmp_path / "swap.blockmap"
    swap.write_text("blockmap swap window 1\nmap a1 a2\nmap a2 a1\n", encoding="utf-8")
    written = tmp_path / "twice.blockmap"
    out, code = run_cli([
        "compose", "--phi", str(swap), "--psi", str(swap), "--write-code", str(written),
        "--format", "lines",
    ], capsys)
    assert code == 0
    assert "map\ta1 a1" in lines(out)
    assert written.read_text(encoding="utf-8").startswith("blockmap swap_after_swap window 1")


def test_cli_verify_conjugacy(files, capsys):
    out, code = run_cli([
        "verify-conjugacy",
        "--source", str(files["g1.shift"]), "--target", str(files["g1_hb2.shift"]),
        "--forward", str(files["phi2.blockmap"]), "--backward", str(files["pi2.blockmap"]),
        "--depth", "3", "--format", "lines",
    ], capsys)
    assert code == 0
    assert "status\tverified" in lines(out)
    assert "depth\t3" in lines(out)


def test_cli_verify_conjugacy_refuted(files, capsys):
    out, code = run_cli([
        "verify-conjugacy",
        "--source", str(files["g1.shift"]), "--target", str(files["g1_hb2.shift"]),
        "--forward", str(files["phi2.blockmap"]), "--backward", str(files["phi2.blockmap"]),
        "--sample", "(e.f)", "--format", "lines",
    ], capsys)
    assert code == 1
    assert "status\trefuted" in lines(out)
    assert out.err.startswith("refuted: ")


# -------------------------------
# Algebras and Groupoids
# -------------------------------
def test_cli_ck_image(files, capsys):
    out, code = run_cli([
        "ck-image", "--E", str(files["g1.graph"]), "--F", str(files["g1_hb2.graph"]),
        "--phi", str(files["phi2.blockmap"]), "--verify", "--surjective", "--format", "lines",
    ], capsys)
    assert code == 0
    records = lines(out)
    assert "ck-family\tvalid" in records
    assert sum(r.startswith("t_") for r in records) == 5
    assert not any("not recovered" in r for r in records)


def test_cli_ck_image_pushes_an_element_forward(files, capsys):
    element = files["g1.graph"].parent / "se.element"
    element.write_text("# s_e\n1 * e ; @v\n", encoding="utf-8")
    out, code = run_cli([
        "ck-image", "--E", str(files["g1.graph"]), "--F", str(files["g1_hb2.graph"]),
        "--phi", str(files["phi2.blockmap"]), "--element", str(element), "--format", "lines",
    ], capsys)
    assert code == 0
    records = dict(r.split("\t", 1) for r in lines(out))
    E, F = load_graph(files["g1.graph"]), load_graph(files["g1_hb2.graph"])
    images = theorem813_images(E, F, HigherBlockMap(2))
    assert records["image"] == str(pushforward(images, edge_isometry(E, "e")))


def test_cli_ck_image_rejects_a_bad_element(files, capsys):
    element = files["g1.graph"].parent / "bad.element"
    element.write_text("1 * e ; @u\n", encoding="utf-8")
    out, code = run_cli([
        "ck-image", "--E", str(files["g1.graph"]), "--F", str(files["g1_hb2.graph"]),
        "--phi", str(files["phi2.blockmap"]), "--element", str(element),
    ], capsys)
    assert code == 2
    assert "line 1" in out.err


def test_cli_groupoid(files, capsys):
    out, code = run_cli([
        "groupoid", "--E", str(files["g1.graph"]),
        "--triple", "(e.f)", "1", "(f.e)",
        "--triple", "(f.e)", "-1", "(e.f)",
        "--format", "lines",
    ], capsys)
    assert code == 0
    records = lines(out)
    assert "element 1\t((e.f), 1, (f.e))" in records
    assert "inverse 1\t((f.e), -1, (e.f))" in records
    assert "product\t((e.f), 0, (e.f))" in records


def test_cli_groupoid_not_composable(files, capsys):
    out, code = run_cli([
        "groupoid", "--E", str(files["g1.graph"]),
        "--triple", "(e.f)", "1", "(f.e)",
        "--triple", "(g)", "0", "(g)",
        "--format", "lines",
    ], capsys)
    assert code == 1
    assert "not composable" in out.err


def test_cli_groupoid_maps_with_h(files, capsys):
    out, code = run_cli([
        "groupoid", "--E", str(files["g1.graph"]), "--F", str(files["g1_hb2.graph"]),
        "--phi", str(files["phi2.blockmap"]), "--triple", "(g)", "0", "(g)", "--format", "lines",
    ], capsys)
    assert code == 0
    assert "H(element 1)\t((<g.g>), 0, (<g.g>))" in lines(out)


def test_cli_groupoid_needs_phi_and_f_together(files, capsys):
    _, code = run_cli([
        "groupoid", "--E", str(files["g1.graph"]), "--phi", str(files["phi2.blockmap"]),
        "--triple", "(g)", "0", "(g)",
    ], capsys)
    assert code == 2


def test_cli_metric(capsys):
    out, code = run_cli(["metric", "--x", "a1|(a2)", "--y", "(a1)", "--format", "lines"], capsys)
    assert code == 0
    records = lines(out)
    assert "common-prefix\t1" in records
    assert any(r.startswith("D\t") for r in records)


# -------------------------------
# Errors and Exit Codes
# -------------------------------
def test_cli_missing_file(tmp_path, capsys):
    out, code = run_cli(["classify", "--shift", str(tmp_path / "absent.shift")], capsys)
    assert code == 2
    assert out.err.startswith("error: ")


def test_cli_parse_error_reports_the_line(tmp_path, capsys):
    bad = tmp_path / "bad.shift"
    bad.write_text("shift forbidden finite:2\nblock a9\n", encoding="utf-8")
    out, code = run_cli(["blocks", "--shift", str(bad), "--n", "1"], capsys)
    assert code == 2
    assert "line 2" in out.err


def test_cli_bad_environment(monkeypatch, capsys):
    monkeypatch.setenv("SHIFTLAB_HORIZON", "none")
    out, code = run_cli(["classify", "--shift", "builtin:full"], capsys)
    assert code == 2
    assert "SHIFTLAB_HORIZON" in out.err


def test_cli_environment_sets_defaults(monkeypatch, capsys):
    monkeypatch.setenv("SHIFTLAB_HORIZON", "2")
    out, code = run_cli(
        ["blocks", "--shift", "builtin:full", "--n", "1", "--format", "lines"], capsys
    )
    assert code == 0
    assert lines(out) == ["block\ta1", "block\ta2"]


def test_cli_without_command(capsys):
    out, code = run_cli([], capsys)
    assert code == 2
    assert "usage" in out.out.lower()


def test_cli_help_flags(capsys):
    for flag, expected in [
        ("--help", "usage"),
        ("--help-formats", "emitter-infinite"),
    ]:
        out, code = run_cli([flag], capsys)
        assert code == 0
        assert expected.lower() in out.out.lower()


# -------------------------------
# Export Formats
# -------------------------------
def test_cli_export_formats(files, tmp_path, capsys):
    out_dir = tmp_path / "reports"
    out, code = run_cli([
        "blocks", "--shift", str(files["g1.shift"]), "--n", "2",
        "--export", "json", "csv", "--out", str(out_dir),
    ], capsys)
    assert code == 0
    assert list(out_dir.glob("shiftlab_blocks_*.json"))
    assert list(out_dir.glob("shiftlab_blocks_*.csv"))
    assert "Exported json" in out.out


def test_cli_invalid_export_format(files, tmp_path, capsys):
    out, code = run_cli([
        "blocks", "--shift", str(files["g1.shift"]), "--n", "1",
        "--export", "html", "--out", str(tmp_path),
    ], capsys)
    assert code != 0
    assert "invalid choice" in out.err


def test_cli_rejects_parent_segments(files, tmp_path, capsys):
    out, code = run_cli([
        "blocks", "--shift", str(files["g1.shift"]), "--n", "1",
        "--export", "json", "--out", str(tmp_path / ".." / "elsewhere"),
    ], capsys)
    assert code == 2
    assert "--out" in out.err


def test_cli_export_failure_is_reported(monkeypatch, files, tmp_path, capsys):
    def failing_export(df, format, filename):
        raise OSError("disk full")
    monkeypatch.setattr(cli, "export_report", failing_export)
    out, code = run_cli([
        "blocks", "--shift", str(files["g1.shift"]), "--n", "1",
        "--export", "csv", "--out", str(tmp_path),
    ], capsys)
    assert code == 0
    assert "Failed to export csv" in out.out


# -------------------------------
# __main__ entrypoint
# -------------------------------
def test_cli_main_entrypoint(files):
    result = subprocess.run(
        [sys.executable, "-m", "shiftlab.cli", "blocks", "--shift", str(files["g1.shift"]),
         "--n", "1", "--format", "lines"],
        capture_output=True, text=True
    )
    assert result.returncode == 0
    assert result.stdout.splitlines() == ["block\te", "block\tf", "block\tg"]
