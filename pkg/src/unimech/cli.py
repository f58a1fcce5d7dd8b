"""Command-line entry points.

  unimech validate MODEL        check the structure axioms, exit 0/2
  unimech describe MODEL        print dimensions, labels, cocycle entries
  unimech run CONFIG.json       integrate a reduced flow, write csv/json

MODEL is a preset name ("kepler", "tokamak", "so3", ...) or a path to a
JSON document (product or algebra form).  Exit codes: 0 success, 1 bad
configuration or usage, 2 validation failure, 3 numerical blow-up during
integration.  The UM_TOL environment variable overrides the default
tolerance used by every constructor.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .algebra import algebra_from_doc
from .dynamics import (
    EnergySpec,
    conservation_report,
    ep_field,
    lp_field,
    rk4,
    write_report_json,
    write_trajectory_csv,
)
from .errors import ConfigError, NonFiniteState, UnknownPreset
from .models import build_model
from .products import (
    UnifiedProductData,
    compose_bracket,
    from_subalgebra,
    product_from_doc,
    validate_axioms,
)
from .thirdorder import ep3_field, third_order_product

__all__ = ["main"]


def _load_json(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"no such file: {path}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return doc


def _resolve_model(node, params: dict | None = None) -> UnifiedProductData:
    """Model from a config node: preset name, {"name":..., "params":...},
    an inline document, or a path to one."""
    if isinstance(node, str):
        if node.endswith(".json") or Path(node).exists():
            return _model_from_doc(_load_json(node))
        return build_model(node, params)
    if isinstance(node, dict):
        if "name" in node:
            return build_model(node["name"], node.get("params"))
        return _model_from_doc(node)
    raise ConfigError(f"cannot interpret model specification {node!r}")


def _model_from_doc(doc: dict) -> UnifiedProductData:
    if "dim_m" in doc:
        return product_from_doc(doc)
    if "dim" in doc:
        return from_subalgebra(algebra_from_doc(doc))
    raise ConfigError("model document needs either 'dim_m' (product) or 'dim' (algebra)")


def _print_validation(d: UnifiedProductData) -> bool:
    report = validate_axioms(d)
    composed = compose_bracket(d)
    alg_report = composed.validate()
    h_report = d.h.validate()
    for name in report.residuals:
        flag = "ok" if report.residuals[name] <= report.tol else "FAIL"
        witness = ",".join(report.witnesses[name])
        print(f"axiom {name:<22} residual {report.residuals[name]:9.3e}  [{flag}]"
              + (f"  worst at ({witness})" if flag == "FAIL" and witness else ""))
    print(f"h antisymmetry               residual {h_report.antisymmetry:9.3e}  "
          f"[{'ok' if h_report.antisymmetry <= h_report.tol else 'FAIL'}]")
    print(f"h jacobi                     residual {h_report.jacobi:9.3e}  "
          f"[{'ok' if h_report.jacobi <= h_report.tol else 'FAIL'}]")
    print(f"composed jacobi              residual {alg_report.jacobi:9.3e}  "
          f"[{'ok' if alg_report.jacobi <= alg_report.tol else 'FAIL'}]")
    return report.ok and alg_report.ok and h_report.ok


def _cmd_validate(args) -> int:
    params = json.loads(args.params) if args.params else None
    d = _resolve_model(args.model, params)
    ok = _print_validation(d)
    print("result: ok" if ok else "result: FAIL")
    return 0 if ok else 2


def _cmd_describe(args) -> int:
    params = json.loads(args.params) if args.params else None
    d = _resolve_model(args.model, params)
    print(f"dim_m={d.dim_m} dim_h={d.dim_h} total={d.dim}")
    print("m labels:", " ".join(d.m_labels) if d.dim_m else "(empty)")
    print("h labels:", " ".join(d.h.labels))
    for tensor, name, axes in (
        (d.act, "action", (d.m_labels, d.h.labels, d.m_labels)),
        (d.phi, "m-bracket", (d.m_labels, d.m_labels, d.m_labels)),
        (d.theta, "cocycle", (d.h.labels, d.m_labels, d.m_labels)),
        (d.psi, "twist", (d.h.labels, d.h.labels, d.m_labels)),
    ):
        nz = np.argwhere(tensor != 0.0)
        print(f"{name}: {len(nz)} nonzero entries")
        for row in nz[:20]:
            k, i, j = (int(x) for x in row)
            print(f"  {name}[{axes[0][k]}, {axes[1][i]}, {axes[2][j]}] = {tensor[k, i, j]:g}")
        if len(nz) > 20:
            print(f"  ... and {len(nz) - 20} more")
    return 0


def _resolve_energy(node, dim: int) -> EnergySpec:
    if node is None:
        return EnergySpec.identity(dim)
    if not isinstance(node, dict):
        raise ConfigError("energy must be an object")
    kind = node.get("kind", "quadratic")
    if kind != "quadratic":
        raise ConfigError(f"config files support quadratic energies only, got {kind!r}")
    inertia = node.get("inertia", "identity")
    if inertia == "identity":
        return EnergySpec.identity(dim)
    arr = np.asarray(inertia, dtype=float)
    if arr.ndim == 1:
        if arr.size != dim:
            raise ConfigError(f"diagonal inertia needs {dim} entries, got {arr.size}")
        return EnergySpec.diagonal(arr)
    if arr.shape == (dim, dim):
        return EnergySpec.quadratic(arr)
    raise ConfigError(f"inertia must be 'identity', a diagonal or a {dim}x{dim} matrix")


def _block_functionals(kind: str, d: UnifiedProductData, g, dim: int) -> dict:
    if kind == "ep3":
        n = g.dim
        blocks = [("pi0", 0, n), ("pi1", n, 2 * n), ("pi2", 2 * n, 3 * n)]
    else:
        blocks = []
        if d.dim_m:
            blocks.append(("m", 0, d.dim_m))
        blocks.append(("h", d.dim_m, d.dim))

    def norm_sq(lo, hi):
        return lambda y: float(np.dot(y[lo:hi], y[lo:hi]))

    return {f"norm_sq_{name}": norm_sq(lo, hi) for name, lo, hi in blocks}


def _cmd_run(args) -> int:
    cfg = _load_json(args.config)
    for key in ("model", "dynamics", "initial", "integrator"):
        if key not in cfg:
            raise ConfigError(f"config is missing '{key}'")
    d = _resolve_model(cfg["model"])
    kind = cfg["dynamics"]
    if kind not in ("ep", "lp", "ep3"):
        raise ConfigError(f"dynamics must be 'ep', 'lp' or 'ep3', got {kind!r}")

    if not _print_validation(d):
        print("result: FAIL (structure axioms)", file=sys.stderr)
        return 2

    g = None
    if kind == "ep3":
        if d.dim_m != 0:
            raise ConfigError("ep3 dynamics needs a plain algebra model (empty m part)")
        g = d.h
        dim = 3 * g.dim
        labels = third_order_product(g).labels
    else:
        dim = d.dim
        labels = d.labels

    spec = _resolve_energy(cfg.get("energy"), dim)
    y0 = np.asarray(cfg["initial"], dtype=float)
    if y0.shape != (dim,):
        raise ConfigError(f"initial state needs {dim} entries, got {y0.shape}")
    integ = cfg["integrator"]
    if not isinstance(integ, dict) or "h" not in integ or "steps" not in integ:
        raise ConfigError("integrator needs 'h' and 'steps'")
    h, steps = float(integ["h"]), int(integ["steps"])
    if h <= 0 or steps < 1:
        raise ConfigError("integrator needs h > 0 and steps >= 1")

    if kind == "ep":
        field = lambda y: ep_field(d, spec, y)  # noqa: E731
    elif kind == "lp":
        field = lambda y: lp_field(d, spec, y)  # noqa: E731
    else:
        field = lambda y: ep3_field(g, spec, y)  # noqa: E731

    try:
        traj = rk4(field, y0, h, steps, labels=tuple(labels))
    except NonFiniteState as exc:
        print(f"error: state became non-finite at step {exc.step}", file=sys.stderr)
        return 3

    functionals = {}
    for tag in cfg.get("conserve", ["hamiltonian"]):
        if tag in ("hamiltonian", "energy"):
            functionals[tag] = spec.hamiltonian
        elif tag == "norm_sq_block":
            functionals.update(_block_functionals(kind, d, g, dim))
        else:
            raise ConfigError(f"unknown conserved-quantity tag {tag!r}")
    report = conservation_report(traj, functionals)

    outputs = cfg.get("outputs", {})
    if "trajectory" in outputs:
        write_trajectory_csv(traj, outputs["trajectory"])
        print(f"trajectory: {outputs['trajectory']} ({len(traj)} rows)")
    if "report" in outputs:
        write_report_json(report, outputs["report"])
        print(f"report: {outputs['report']}")

    for name, entry in report.items():
        print(
            f"{name}: initial {entry['initial']:.12g}, max drift "
            f"{entry['max_abs_drift']:.3e} (rel {entry['max_rel_drift']:.3e})"
        )
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="unimech",
        description="Cocycle double cross sum algebras and their reduced flows.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate a flow described by a JSON config")
    p_run.add_argument("config", help="path to the run configuration")
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate", help="check the structure axioms of a model")
    p_val.add_argument("model", help="preset name or JSON document path")
    p_val.add_argument("--params", help="JSON object of preset parameters")
    p_val.set_defaults(func=_cmd_validate)

    p_desc = sub.add_parser("describe", help="print the structure of a model")
    p_desc.add_argument("model", help="preset name or JSON document path")
    p_desc.add_argument("--params", help="JSON object of preset parameters")
    p_desc.set_defaults(func=_cmd_describe)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, UnknownPreset, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON ({exc})", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
