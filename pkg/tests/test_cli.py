import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from zetameasure.cli import parse_complex, parse_expression, parse_region, read_config, run
from zetameasure.complexgrid import RegionMask, mask_from_text
from zetameasure.planar import domain_from_text
from zetameasure.polyfree import Poly
from zetameasure.universality import profile_from_csv


def invoke(*argv):
    out = io.StringIO()
    code = run(list(argv), stdout=out)
    return code, out.getvalue()


def error_of(capsys, *argv):
    code, _ = invoke(*argv)
    return code, json.loads(capsys.readouterr().err)


def test_zeta_eval_summary():
    code, text = invoke("zeta-eval", "--s", "2")
    assert code == 0
    doc = json.loads(text)
    assert doc["command"] == "zeta-eval"
    assert abs(doc["outputs"]["value"][0] - math.pi ** 2 / 6) < 1e-12
    assert set(doc["versions"]) == {"zetameasure", "numpy", "scipy", "python"}


def test_pole_is_domain_error(capsys):
    code, err = error_of(capsys, "zeta-eval", "--s", "1")
    assert code == 1 and err["error"] == "pole"


def test_region_outside_strip(capsys):
    code, err = error_of(capsys, "scan", "--region", "rect:0,1,0,1", "--k", "3")
    assert code == 1 and err["error"] == "domain"


def test_usage_errors(capsys):
    for argv in (["zeta-eval"], ["no-such-command"], ["zeta-eval", "--s", "2", "--bogus", "1"],
                 ["zeta-eval", "--s", "2", "--err", "-1"], ["scan", "--g", "__import__('os')"]):
        code, err = error_of(capsys, *argv)
        assert code == 2 and err["error"] == "usage", argv


def test_resolution_error_carries_level(capsys):
    code, err = error_of(capsys, "harmonic-demo", "--region", "rect:0,1,0,1", "--k", "3",
                         "--v", "real(exp(5j*z))", "--n", "8")
    assert code == 1
    assert err["error"] == "resolution" and err["required_k"] == 4


def test_rouche_outputs_and_failure(capsys):
    code, text = invoke("rouche")
    doc = json.loads(text)["outputs"]
    assert code == 0 and doc["certified"] and doc["winding_f"] == doc["winding_g"] == 1
    code, err = error_of(capsys, "rouche", "--f", "z - 0.75 + 0.2")
    assert code == 1 and err["error"] == "dominance" and "index" in err


def test_outputs_identical_on_rerun(tmp_path):
    argv = ["self-approx", "--t-max", "5", "--epsilon", "0.1,0.4"]
    code, a = invoke(*argv, "--out", str(tmp_path / "a"))
    code2, b = invoke(*argv, "--out", str(tmp_path / "b"), "--threads", "1")
    assert code == code2 == 0
    assert (tmp_path / "a" / "data.csv").read_bytes() == (tmp_path / "b" / "data.csv").read_bytes()
    assert json.loads(a)["outputs"] == json.loads(b)["outputs"]
    assert invoke(*argv)[1] == a


def test_scan_files_reparse(tmp_path):
    code, text = invoke("scan", "--t-max", "20", "--step", "0.5", "--out", str(tmp_path))
    assert code == 0
    prof = profile_from_csv((tmp_path / "data.csv").read_text())
    assert prof.t.size == 41 and prof.t[0] == 0.0
    K = mask_from_text((tmp_path / "region.mask").read_text())
    assert K == RegionMask.disk(0.75, 0.03, 7)
    doc = json.loads((tmp_path / "summary.json").read_text())
    assert doc == json.loads(text)
    assert sorted(doc["files"]) == ["data.csv", "region.mask"]
    assert doc["outputs"]["estimate"]["samples"] == 41


def test_polyfree_files_reparse(tmp_path):
    code, text = invoke("polyfree", "--out", str(tmp_path))
    assert code == 0
    poly = Poly.from_json((tmp_path / "poly.json").read_text())
    K_eps = mask_from_text((tmp_path / "K_eps.mask").read_text())
    z = K_eps.centers
    out = json.loads(text)["outputs"]
    # the fit targets g_eps: g lifted to 1/j where |g| <= 1/j
    geps = np.where(np.abs(z) <= 1 / out["j"], 1 / out["j"], z)
    assert np.abs(poly(z) - geps).max() == pytest.approx(out["sup_error_on_Keps"])
    assert np.abs(poly(z)).min() > 0


def test_dirichlet_build_domain_file(tmp_path):
    code, text = invoke("dirichlet-build", "--k", "6", "--samples", "32", "--J", "2", "--out", str(tmp_path))
    assert code == 0
    U = domain_from_text((tmp_path / "domain.txt").read_text())
    assert U.U == RegionMask.disk(0, 1, 6)
    assert len(json.loads(text)["outputs"]["disks"]) == 2


def test_config_file_overridden_by_flags(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# census settings\nsigma-star = 0.6\nT: 20\nm = 10\n")
    assert read_config(str(cfg)) == {"sigma_star": "0.6", "T": "20", "m": "10"}
    code, text = invoke("zeros-census", "--config", str(cfg))
    out = json.loads(text)["outputs"]
    assert code == 0 and out["n"] == 2 and out["fraction"] == 1.0
    code, text = invoke("zeros-census", "--config", str(cfg), "--T", "10")
    assert json.loads(text)["outputs"]["n"] == 1


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, err = error_of(capsys, "zeta-eval", "--s", "2", "--config", str(cfg))
    assert code == 2 and err["error"] == "usage"


def test_zeros_census_csv(tmp_path):
    code, _ = invoke("zeros-census", "--T", "30", "--m", "10", "--out", str(tmp_path))
    lines = (tmp_path / "data.csv").read_text().splitlines()
    assert lines[0] == "j,t_lo,t_hi,count,nu_over_j" and len(lines) == 4


def test_census_needs_multiple(capsys):
    code, err = error_of(capsys, "zeros-census", "--T", "25", "--m", "10")
    assert code == 2


def test_parsers():
    assert parse_complex("0.5+14.13i") == 0.5 + 14.13j
    assert parse_complex("2") == 2
    f = parse_expression("exp(z) - 1")
    assert f(np.array([0j]))[0] == 0
    assert parse_region("annulus:0,0,0.5,1", 5) == RegionMask.annulus(0, 0.5, 1, 5)
    assert parse_region("rect:0,1,0,1", 4) == RegionMask.rect(0, 1, 0, 1, 4)


def test_installed_entry_point():
    proc = subprocess.run([sys.executable, "-m", "zetameasure.cli", "zeta-eval", "--s", "3"],
                          capture_output=True, text=True, check=True)
    assert abs(json.loads(proc.stdout)["outputs"]["value"][0] - 1.2020569031595943) < 1e-12
