import json

import numpy as np
import pytest

from sinlens import io as sio
from sinlens.caustic import trace_caustic
from sinlens.cli import main
from sinlens.core import LensParams
from sinlens.solver import find_all


def test_report_roundtrip():
    for p, w in [(LensParams(1.92), 0.67j), (LensParams(1.1, 0.1 - 0.2j), 0.3 - 1e-7j)]:
        rep = find_all(p, w)
        d = json.loads(sio.dumps(sio.report_to_dict(rep)))
        back = sio.report_from_dict(d)
        assert back.solutions == rep.solutions
        assert back.params == p and back.w == w
        assert set(d) >= {"k", "alpha", "w", "solutions", "count", "counts_by_orientation"}


def test_caustic_csv_columns():
    text = sio.caustic_csv(trace_caustic(LensParams(1.1), 64))
    lines = text.splitlines()
    assert lines[0] == "t,re_z,im_z,re_image,im_image,arc_id,is_cusp"
    cusp_rows = [l for l in lines[1:] if l.endswith(",1")]
    assert len(cusp_rows) >= 4


def test_svg_deterministic_and_dotted():
    p = LensParams(1.1)
    c = trace_caustic(p, 128)
    a = sio.caustic_svg(p, c)
    assert a == sio.caustic_svg(p, trace_caustic(p, 128))
    assert "stroke-dasharray" in a and a.startswith("<svg")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_solve_json(capsys):
    code, out, _ = run(capsys, "solve", "--k", "1.92", "--w", "0+0.67i", "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert d["count"] == 6 and d["counts_by_orientation"]["Preserving"] == 3


def test_cli_cusps(capsys):
    code, out, _ = run(capsys, "cusps", "--k", "1.1")
    assert code == 0 and len(json.loads(out)) == 4


def test_cli_validation_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        main(["solve", "--k", "1", "--w", "0", "--unknown"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["solve", "--k", "0", "--w", "0"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["solve", "--k", "1", "--w", "nope"])
    assert e.value.code == 2
    code, _, err = run(capsys, "solve", "--k", "1", "--alpha", "1", "--w", "0")
    assert code == 2 and "alpha" in err
    code, _, err = run(capsys, "sweep", "--k", "1", "--resolution", "8", "--out", "x")
    assert code == 2


def test_cli_files_and_provenance(tmp_path, capsys):
    out = tmp_path / "s.json"
    code, _, _ = run(capsys, "solve", "--k", "1.92", "--w", "0.67i", "--check-oracle", "--out", str(out))
    assert code == 0
    d = json.loads(out.read_text())
    assert d["oracle_agreement"] is True
    meta = json.loads((tmp_path / "s.json.meta.json").read_text())
    assert meta["inputs"]["k"] == 1.92 and meta["inputs"]["w"] == "0.0+0.67i"
    assert meta["inputs"]["seed"] == 42

    code, _, _ = run(capsys, "sweep", "--k", "1.92", "--resolution", "20", "--out", str(tmp_path / "sw"))
    assert code == 0
    rows = (tmp_path / "sw.csv").read_text().splitlines()
    assert rows[0] == "re_w,im_w,m,n,on_curve" and len(rows) == 401
    assert (tmp_path / "sw.svg").read_text().startswith("<svg")

    ppm = tmp_path / "b.ppm"
    code, _, _ = run(capsys, "basins", "--k", "1.92", "--w", "0.67i", "--width", "24", "--height", "16",
                     "--out", str(ppm))
    assert code == 0
    img = sio.read_ppm(ppm.read_bytes())
    assert img.shape == (16, 24, 3)
    meta = json.loads((tmp_path / "b.ppm.meta.json").read_text())
    assert len(meta["attractors"]) == 3

    for fmt in ("csv", "svg"):
        code, _, _ = run(capsys, "caustic", "--k", "2.01", "--format", fmt, "--out", str(tmp_path / f"c.{fmt}"))
        assert code == 0
        code, _, _ = run(capsys, "critical", "--k", "2.01", "--format", fmt, "--out", str(tmp_path / f"g.{fmt}"))
        assert code == 0


def test_cli_binary_needs_out(capsys):
    code, _, err = run(capsys, "basins", "--k", "1.92", "--w", "0.67i", "--width", "4", "--height", "4")
    assert code == 2


def test_cli_classify(capsys):
    code, out, _ = run(capsys, "classify", "--k", "1.92", "--w", "0.67i")
    assert code == 0
    d = json.loads(out)
    assert d["m_predicted"] == 3 and d["n_predicted"] == 3 and d["consistent"]


def test_cli_inconsistency_exit_1(capsys, monkeypatch):
    import sinlens.cli as cli
    monkeypatch.setattr(cli, "oracle_find_all", lambda p, w: [])
    code, _, err = run(capsys, "solve", "--k", "1.92", "--w", "0.67i", "--check-oracle")
    assert code == 1
    assert json.loads(err)["error"] == "inconsistency"


def test_cli_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "--k", "1.1", "--w", "0", "--density", "600")
    assert code == 0 and json.loads(out)["count"] >= 1


def test_cli_verify_quick(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "quick")
    # criterion 4 carries a known false clause, so the quick suite exits 1
    assert "criterion 1" in out and "criterion 10" in out
    assert code == (0 if "[FAIL]" not in out else 1)
