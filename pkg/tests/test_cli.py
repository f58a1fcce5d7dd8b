import dataclasses
import json

import numpy as np
import pytest

from unimech import build_model, save_algebra, save_product, preset
from unimech.cli import main


def _write_config(tmp_path, name="run.json", **overrides):
    cfg = {
        "model": "so3",
        "dynamics": "lp",
        "energy": {"inertia": [1.0, 2.0, 3.0]},
        "initial": [1.0, 0.2, -0.5],
        "integrator": {"h": 1e-3, "steps": 200},
    }
    cfg.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


def _perturbed_kepler(scale):
    d = build_model("kepler", {"e": 0.5})
    theta = np.array(d.theta)
    theta[0, 1, 2] += scale
    theta[0, 2, 1] -= scale  # keep the stored tensor antisymmetric
    return dataclasses.replace(d, theta=theta)


# -- validate -------------------------------------------------------------------


def test_validate_kepler(capsys):
    assert main(["validate", "kepler", "--params", '{"e": 0.5}']) == 0
    out = capsys.readouterr().out
    assert "result: ok" in out
    assert out.count("[ok]") == 9  # six axioms + h checks + composed jacobi
    assert "axiom cocycle_jacobi" in out


def test_validate_without_required_params(capsys):
    assert main(["validate", "kepler"]) == 1
    assert "error:" in capsys.readouterr().err


def test_validate_broken_document(tmp_path, capsys):
    path = tmp_path / "broken.json"
    save_product(_perturbed_kepler(1e-3), path)
    assert main(["validate", str(path)]) == 2
    out = capsys.readouterr().out
    assert "result: FAIL" in out
    assert "[FAIL]" in out
    assert "worst at (" in out


def test_validate_plain_algebra_document(tmp_path):
    path = tmp_path / "sl2.json"
    save_algebra(preset("sl2"), path)
    assert main(["validate", str(path)]) == 0


def test_tolerance_env_override(tmp_path, capsys, monkeypatch):
    # a 1e-6 defect fails at the default 1e-10 but passes once UM_TOL loosens
    path = tmp_path / "rough.json"
    save_product(_perturbed_kepler(1e-6), path)
    assert main(["validate", str(path)]) == 2
    capsys.readouterr()
    monkeypatch.setenv("UM_TOL", "1e-3")
    assert main(["validate", str(path)]) == 0
    assert "result: ok" in capsys.readouterr().out


# -- describe -------------------------------------------------------------------


def test_describe_kepler(capsys):
    assert main(["describe", "kepler", "--params", '{"e": 1.0}']) == 0
    out = capsys.readouterr().out
    assert "dim_m=3 dim_h=3 total=6" in out
    assert "m labels: v1 v2 v3" in out
    assert "h labels: eta1 eta2 eta3" in out
    assert "action: 6 nonzero entries" in out
    assert "cocycle: 6 nonzero entries" in out
    assert "cocycle[eta3, v1, v2] = 2" in out


def test_describe_plain_algebra(capsys):
    assert main(["describe", "so3"]) == 0
    out = capsys.readouterr().out
    assert "dim_m=0 dim_h=3 total=3" in out
    assert "m labels: (empty)" in out


def test_describe_truncates_long_tensors(tmp_path, capsys):
    # a 6-dim base gives the action tensor 36 nonzero entries, past the cap
    from unimech import TokamakParams, tangent_algebra, tokamak_algebra

    d = tokamak_algebra(TokamakParams(base=tangent_algebra(preset("so3"))))
    path = tmp_path / "big.json"
    save_product(d, path)
    assert main(["describe", str(path)]) == 0
    out = capsys.readouterr().out
    assert "action: 36 nonzero entries" in out
    assert "... and 16 more" in out


# -- run ------------------------------------------------------------------------


def test_run_rigid_body_with_outputs(tmp_path, capsys):
    csv_path = tmp_path / "traj.csv"
    json_path = tmp_path / "report.json"
    cfg = _write_config(
        tmp_path,
        conserve=["hamiltonian", "norm_sq_block"],
        outputs={"trajectory": str(csv_path), "report": str(json_path)},
    )
    assert main(["run", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert f"trajectory: {csv_path} (201 rows)" in out
    assert f"report: {json_path}" in out
    assert "hamiltonian: initial" in out

    header = csv_path.read_text().splitlines()[0]
    assert header == "t,e1,e2,e3"
    data = np.loadtxt(csv_path, delimiter=",", skiprows=1)
    assert data.shape == (201, 4)
    np.testing.assert_allclose(data[0, 1:], [1.0, 0.2, -0.5])

    report = json.loads(json_path.read_text())
    assert set(report) == {"hamiltonian", "norm_sq_h"}
    assert report["hamiltonian"]["max_rel_drift"] < 1e-10
    assert report["norm_sq_h"]["max_rel_drift"] < 1e-10


def test_run_third_order_dynamics(tmp_path, capsys):
    csv_path = tmp_path / "traj3.csv"
    cfg = _write_config(
        tmp_path,
        dynamics="ep3",
        energy=None,
        initial=[0.3, -0.2, 0.5, 0.1, 0.4, -0.3, 0.07, 0.28, -0.21],
        integrator={"h": 1e-3, "steps": 50},
        conserve=["energy", "norm_sq_block"],
        outputs={"trajectory": str(csv_path)},
    )
    assert main(["run", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert "norm_sq_pi0: initial" in out
    assert "norm_sq_pi2: initial" in out
    header = csv_path.read_text().splitlines()[0]
    assert header == "t,e1,e2,e3,de1,de2,de3,dde1,dde2,dde3"


def test_run_inline_model_node(tmp_path):
    cfg = _write_config(
        tmp_path,
        model={"name": "tokamak", "params": {"base": "heisenberg", "b_i": 0.5}},
        dynamics="ep",
        energy=None,
        initial=[0.1] * 12,
        integrator={"h": 0.01, "steps": 20},
    )
    assert main(["run", str(cfg)]) == 0


def test_run_is_deterministic(tmp_path, capsys):
    outputs = []
    for tag in ("a", "b"):
        csv_path = tmp_path / f"{tag}.csv"
        json_path = tmp_path / f"{tag}.json"
        cfg = _write_config(
            tmp_path,
            name=f"cfg_{tag}.json",
            outputs={"trajectory": str(csv_path), "report": str(json_path)},
        )
        assert main(["run", str(cfg)]) == 0
        outputs.append((csv_path.read_bytes(), json_path.read_bytes()))
    capsys.readouterr()
    assert outputs[0] == outputs[1]


def test_run_validates_before_integrating(tmp_path, capsys):
    model_path = tmp_path / "bad_model.json"
    save_product(_perturbed_kepler(1e-3), model_path)
    cfg = _write_config(
        tmp_path,
        model=str(model_path),
        energy=None,
        initial=[0.0] * 6,
    )
    assert main(["run", str(cfg)]) == 2
    captured = capsys.readouterr()
    assert "structure axioms" in captured.err
    assert "[FAIL]" in captured.out


def test_run_blow_up_exits_3(tmp_path, capsys):
    cfg = _write_config(
        tmp_path,
        initial=[1e5, 2e5, -1e5],
        integrator={"h": 1e3, "steps": 10},
    )
    with np.errstate(over="ignore", invalid="ignore"):
        assert main(["run", str(cfg)]) == 3
    assert "state became non-finite at step" in capsys.readouterr().err


@pytest.mark.parametrize(
    "overrides,fragment",
    [
        ({"dynamics": None}, "missing"),
        ({"dynamics": "rk"}, "dynamics must be"),
        ({"initial": [1.0, 2.0]}, "initial state needs 3"),
        ({"conserve": ["wobble"]}, "unknown conserved-quantity"),
        ({"integrator": {"h": -1.0, "steps": 5}}, "h > 0"),
        ({"integrator": {"steps": 5}}, "'h' and 'steps'"),
        ({"energy": 5}, "energy must be an object"),
        ({"energy": {"kind": "blackbox"}}, "quadratic energies only"),
        ({"energy": {"inertia": [1.0, 2.0]}}, "needs 3 entries"),
        ({"model": "kepler", "dynamics": "ep3"}, "bad kepler"),
    ],
)
def test_run_config_errors(tmp_path, capsys, overrides, fragment):
    if overrides.get("dynamics", "") is None:
        cfg_dict = json.loads(_write_config(tmp_path).read_text())
        del cfg_dict["dynamics"]
        cfg = tmp_path / "missing.json"
        cfg.write_text(json.dumps(cfg_dict))
    else:
        cfg = _write_config(tmp_path, **overrides)
    assert main(["run", str(cfg)]) == 1
    assert fragment in capsys.readouterr().err


def test_run_ep3_needs_a_plain_algebra(tmp_path, capsys):
    cfg = _write_config(
        tmp_path,
        model={"name": "kepler", "params": {"e": 0.5}},
        dynamics="ep3",
        energy=None,
        initial=[0.0] * 18,
    )
    assert main(["run", str(cfg)]) == 1
    assert "plain algebra" in capsys.readouterr().err


def test_missing_and_malformed_files(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.json")]) == 1
    assert "no such file" in capsys.readouterr().err

    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", str(bad)]) == 1
    assert "line 1" in capsys.readouterr().err

    listy = tmp_path / "list.json"
    listy.write_text("[1, 2]")
    assert main(["run", str(listy)]) == 1
    assert "expected a JSON object" in capsys.readouterr().err


def test_model_document_needs_a_recognized_shape(tmp_path, capsys):
    path = tmp_path / "odd.json"
    path.write_text(json.dumps({"foo": 1}))
    assert main(["validate", str(path)]) == 1
    assert "either 'dim_m'" in capsys.readouterr().err


def test_unknown_subcommand_is_a_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        main(["frobnicate"])
    assert excinfo.value.code == 2
