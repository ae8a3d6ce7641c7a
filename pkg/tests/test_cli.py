import json
import math
import shutil
from pathlib import Path

import pytest

from lde.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, main
from lde.config import SCENARIOS, parse_config
from lde.errors import ConfigError, InvalidGap
from lde.scenarios import perturbative_validity, run

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"
GOLDEN = Path(__file__).parent / "golden"
GOLDEN_NAMES = ["heisenberg_ed", "aklt_sma", "thermal_scan"]


@pytest.mark.parametrize("name", GOLDEN_NAMES)
def test_golden_csv_byte_stable(name, tmp_path):
    assert main(["run", str(CONFIGS / f"{name}.json"), "--output", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / f"{name}.csv").read_bytes() == (GOLDEN / f"{name}.csv").read_bytes()


def test_every_scenario_has_an_example_config():
    names = {json.loads(p.read_text())["scenario"] for p in CONFIGS.glob("*.json")}
    assert names == set(SCENARIOS)
    for p in CONFIGS.glob("*.json"):
        parse_config(p.read_text())


def _rows(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# lde ")
    header = lines[1].split(",")
    return [dict(zip(header, l.split(","))) for l in lines[2:]]


def test_heisenberg_ed_signs_alternate(tmp_path):
    main(["run", str(CONFIGS / "heisenberg_ed.json"), "--output", str(tmp_path)])
    rows = _rows(tmp_path / "heisenberg_ed.csv")
    assert [int(r["r"]) for r in rows] == [1, 2, 3, 4, 5, 6]
    for r in rows:
        assert math.copysign(1, float(r["chi0"])) == (-1) ** (int(r["r"]) + 1)


def test_thermal_scan_threshold(tmp_path):
    main(["run", str(CONFIGS / "thermal_scan.json"), "--output", str(tmp_path)])
    for r in _rows(tmp_path / "thermal_scan.csv"):
        beta, n = float(r["beta"]), float(r["negativity"])
        assert (n > 0) == (beta > math.log(3) / 4)


def test_output_next_to_config(tmp_path):
    shutil.copy(CONFIGS / "aklt_sma.json", tmp_path / "c.json")
    assert main(["run", str(tmp_path / "c.json")]) == EXIT_OK
    assert (tmp_path / "aklt_sma.csv").exists()


def test_json_output(tmp_path):
    assert main(["run", str(CONFIGS / "effective_hamiltonian.json"), "--output", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "effective_hamiltonian.json").read_text())
    rec = doc["records"][0]
    assert doc["config"]["scenario"] == "effective_hamiltonian"
    assert rec["K_xx"] == pytest.approx(rec["K_zz"], rel=1e-9)
    assert rec["J_ab"] == pytest.approx(0.01 * 0.27024005910562, rel=1e-9)
    assert rec["verdict"] == "ok"


def _write(tmp_path, doc):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(doc, indent=2))
    return p


BASE = {"scenario": "heisenberg_ed",
        "chain": {"model": "heisenberg_spin_half", "L": 8, "boundary": "periodic"},
        "sweep": {"r": [1, 2]},
        "output": {"path": "out.csv"}}


def _variant(**patch):
    doc = json.loads(json.dumps(BASE))
    for key, value in patch.items():
        section, _, field = key.partition("__")
        if field:
            doc[section][field] = value
        else:
            doc[section] = value
    return doc


@pytest.mark.parametrize("doc,needle", [
    ({**BASE, "scenario": "heisenberg_dmrg"}, "allowed scenarios: heisenberg_ed"),
    (_variant(chain__boundry="open"), "unknown key 'boundry'"),
    (_variant(chain__L="eight"), "expected an integer"),
    (_variant(chain__L=8.0), "expected an integer"),
    (_variant(chain__model="xxz"), "choose one of"),
    (_variant(sweep={"r": []}), "non-empty sweep.r"),
    (_variant(sweep={"r": [0]}), "separations must be >= 1"),
    (_variant(chain__L=1), "L must be"),
    (_variant(chain__model="bilinear_biquadratic_spin1"), "needs model 'heisenberg_spin_half'"),
    ({k: v for k, v in BASE.items() if k != "output"}, "missing required key 'output'"),
    ({**BASE, "method": "dmrg"}, "choose one of"),
    ({**BASE, "extra": 1}, "unknown key 'extra'"),
])
def test_invalid_configs_exit_2(tmp_path, capsys, doc, needle):
    p = _write(tmp_path, doc)
    assert main(["validate", str(p)]) == EXIT_CONFIG
    assert main(["run", str(p), "--output", str(tmp_path)]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert needle in err
    assert "line " in err
    assert not (tmp_path / "out.csv").exists()


def test_invalid_json_and_missing_file(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text('{"scenario": "heisenberg_ed",\n "chain": }')
    assert main(["run", str(p)]) == EXIT_CONFIG
    assert "line 2" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "absent.json")]) == EXIT_CONFIG


def test_error_line_numbers():
    text = json.dumps(_variant(chain__boundry="open"), indent=2)
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    want = 1 + text.splitlines().index(next(l for l in text.splitlines() if "boundry" in l))
    assert str(exc.value).startswith(f"line {want}:")


def test_cft_config_checks(tmp_path):
    doc = json.loads((CONFIGS / "heisenberg_cft.json").read_text())
    doc["chain"]["boundary"] = "open"
    assert main(["validate", str(_write(tmp_path, doc))]) == EXIT_CONFIG
    doc = json.loads((CONFIGS / "heisenberg_cft.json").read_text())
    doc["sweep"]["r"] = [9]
    assert main(["validate", str(_write(tmp_path, doc))]) == EXIT_CONFIG


def test_numerical_failure_exit_3(tmp_path, capsys):
    # odd Heisenberg ring: degenerate ground level
    doc = _variant(chain__L=7)
    assert main(["run", str(_write(tmp_path, doc)), "--output", str(tmp_path)]) == EXIT_NUMERICAL
    assert "DegenerateGroundState" in capsys.readouterr().err
    # open AKLT chain: edge-state multiplet
    doc = {"scenario": "aklt_ed",
           "chain": {"model": "bilinear_biquadratic_spin1", "L": 6, "boundary": "open"},
           "sweep": {"r": [1]}, "output": {"path": "out.csv"}}
    assert main(["run", str(_write(tmp_path, doc)), "--output", str(tmp_path)]) == EXIT_NUMERICAL


def test_strict_validity(tmp_path):
    doc = json.loads((CONFIGS / "perturbation_validation.json").read_text())
    doc["sweep"]["J_p"] = [1.0]
    p = _write(tmp_path, doc)
    assert main(["run", str(p), "--output", str(tmp_path)]) == EXIT_OK
    assert main(["run", str(p), "--output", str(tmp_path), "--strict"]) == EXIT_NUMERICAL


def test_threads_do_not_change_results():
    cfg = parse_config((CONFIGS / "aklt_sma.json").read_text())
    assert run(cfg, threads=4).rows == run(cfg, threads=1).rows


def test_list_and_version(capsys):
    assert main(["list-scenarios"]) == EXIT_OK
    out = capsys.readouterr().out
    for name in SCENARIOS:
        assert name in out
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0


def test_validity_report():
    assert perturbative_validity(0.0, 0.5, 1.0).verdict == "ok"
    rep = perturbative_validity(0.1, 0.5, 1.0)
    assert rep.ratio == pytest.approx(0.005) and rep.verdict == "ok"
    rep = perturbative_validity(1.0, 0.5, 1.0)
    assert rep.ratio == pytest.approx(0.5) and rep.verdict == "invalid"
    assert perturbative_validity(1.0, 0.2, 1.0).verdict == "marginal"
    with pytest.raises(InvalidGap):
        perturbative_validity(0.1, 0.5, 0.0)


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.stem)
def test_resolved_config_roundtrip(path):
    cfg = parse_config(path.read_text())
    again = parse_config(json.dumps(cfg.to_dict()))
    assert again == cfg
