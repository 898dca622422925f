"""``fgplate`` command line: analysis, convergence, tables, dataset, training, prediction.

Exit codes: 0 success, 1 bad input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

import numpy as np

from . import navier, tables
from .case import Problem
from .config import CaseConfig, ConfigError, load_config
from .material import Gradation
from .mesh import build_mesh, constrained_dofs
from .solver import SolverError, analyze, nondimensionalize
from .surrogate.dataset import DEFAULT_DATASET_MESH, Sample, generate_dataset, read_dataset
from .surrogate.network import SurrogateModel, TrainConfig, TrainingDivergedError, predict, train

log = logging.getLogger("fgplate")

EXIT_OK, EXIT_USER, EXIT_NUMERICAL = 0, 1, 2


class UserError(Exception):
    pass


RESULT_COLUMNS = ("problem", "bc", "a", "h0", "a_over_h0", "thickness_type", "kx", "ky", "kz",
                  "ceramic", "metal", "mixing", "kw_bar", "kw_si", "load", "q0", "convention",
                  "mode", "nondimensional", "residual", "nx", "ny")


def _g(v: float) -> str:
    return f"{v:.10g}"


def _descriptor(cfg: CaseConfig) -> dict:
    c, g = cfg.case, cfg.case.gradation
    bending = c.problem is Problem.BENDING
    return {
        "problem": c.problem.value, "bc": c.bc, "a": _g(c.a), "h0": _g(c.h0),
        "a_over_h0": _g(c.a_over_h0), "thickness_type": c.thickness_kind.value,
        "kx": _g(g.kx), "ky": _g(g.ky), "kz": _g(g.kz), "ceramic": c.ceramic.name,
        "metal": c.metal.name, "mixing": c.mixing.value, "kw_bar": _g(c.kw_bar),
        "kw_si": _g(c.kw_si), "load": c.load.value if bending else "",
        "q0": _g(c.q0) if bending else "", "convention": cfg.convention,
    }


def _check_nonempty(cfg: CaseConfig) -> None:
    mesh = build_mesh(cfg.case.a, cfg.nx, cfg.ny)
    if len(constrained_dofs(mesh, cfg.case.bc)) == mesh.n_dofs:
        raise UserError(f"mesh: empty reduced system ({cfg.case.bc} on {cfg.nx}x{cfg.ny} "
                        "elements constrains every DOF)")


def _result_rows(cfg: CaseConfig, mesh_n: int) -> list[dict]:
    res = analyze(cfg.case, n=mesh_n, convention=cfg.convention, n_modes=cfg.modes)
    base = {**_descriptor(cfg), "residual": f"{res.residual:.3e}", "nx": mesh_n, "ny": mesh_n}
    if cfg.case.problem is Problem.BENDING:
        return [{**base, "mode": 1, "nondimensional": _g(res.nondimensional)}]
    rows = []
    for i, lam in enumerate(res.eigenvalues, 1):
        raw = np.sqrt(lam) if cfg.case.problem is Problem.FREE_VIBRATION else lam
        nd = nondimensionalize(raw, cfg.case, cfg.convention, kind=res.kind)
        rows.append({**base, "mode": i, "nondimensional": _g(nd)})
    return rows


def _csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    sys.stdout.write(text)
    if out:
        Path(out).write_text(text, encoding="utf-8")


def cmd_analyze(args) -> int:
    cfg = load_config(args.config)
    n = args.mesh[0] if args.mesh else cfg.nx
    cfg = CaseConfig(cfg.case, n, n, cfg.convention, cfg.modes)
    _check_nonempty(cfg)
    _emit(_csv(_result_rows(cfg, n), RESULT_COLUMNS), args.out)
    return EXIT_OK


def _navier_reference(cfg: CaseConfig) -> float | None:
    """Closed-form value for homogeneous SSSS cases, otherwise None."""
    c, g = cfg.case, cfg.case.gradation
    homogeneous = g.kx == g.ky == g.kz == 0 and c.thickness_kind.value == 1
    if not homogeneous or c.bc != "SSSS" or cfg.convention != "ceramic":
        return None
    mat = c.ceramic
    e, nu, h, a = mat.young_modulus, mat.poisson_ratio, c.h0, c.a
    if c.problem is Problem.BENDING:
        w = navier.centre_deflection(e, nu, h, a, c.q0, c.load.value, kw=c.kw)
        return nondimensionalize(w, c, "ceramic")
    if c.problem is Problem.FREE_VIBRATION:
        return nondimensionalize(navier.fundamental_frequency(e, nu, mat.density, h, a, kw=c.kw), c, "ceramic")
    nyy = 1.0 if c.problem is Problem.BI_BUCKLING else 0.0
    return nondimensionalize(navier.critical_load(e, nu, h, a, 1.0, nyy, kw=c.kw), c, "ceramic")


def cmd_converge(args) -> int:
    cfg = load_config(args.config)
    meshes = args.mesh or [8, 16, 32]
    ref = _navier_reference(cfg)
    rows, prev = [], None
    for n in meshes:
        sub = CaseConfig(cfg.case, n, n, cfg.convention, 1)
        _check_nonempty(sub)
        res = analyze(cfg.case, n=n, convention=cfg.convention)
        v = res.nondimensional
        rows.append({
            "mesh": n, "nondimensional": _g(v), "residual": f"{res.residual:.3e}",
            "rel_delta": "" if prev is None else _g((v - prev) / prev),
            "navier": "" if ref is None else _g(ref),
            "navier_rel_error": "" if ref is None else _g((v - ref) / ref),
        })
        prev = v
    cols = ("mesh", "nondimensional", "residual", "rel_delta", "navier", "navier_rel_error")
    _emit(_csv(rows, cols), args.out)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    if args.table not in tables.TABLE_IDS:
        raise UserError(f"table: unknown table {args.table}; expected one of {tables.TABLE_IDS}")
    mesh = args.mesh[0] if args.mesh else 32
    rows = tables.reproduce(args.table, mesh)
    text = tables.to_csv(rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    print(f"table {args.table}: {len(rows)} rows, mean |rel error| "
          f"{100 * tables.mean_abs_rel_error(rows):.3f}%", file=sys.stderr)
    return EXIT_OK


def cmd_dataset(args) -> int:
    if not args.out:
        raise UserError("out: dataset needs an output path")
    if args.n < 1:
        raise UserError("n: must be >= 1")
    mesh = args.mesh[0] if args.mesh else DEFAULT_DATASET_MESH
    generate_dataset(args.n, seed=args.seed, path=args.out, mesh=mesh, progress=args.progress)
    return EXIT_OK


def cmd_train(args) -> int:
    if not args.dataset or not Path(args.dataset).is_file():
        raise UserError(f"dataset: file not found: {args.dataset}")
    if not args.model:
        raise UserError("model: training needs an output model path")
    samples = read_dataset(args.dataset)
    config = TrainConfig(epochs=args.epochs, seed=args.seed, batch_norm=not args.no_batch_norm,
                         batch_size=args.batch_size, lr_schedule=args.lr_schedule, refresh_bn=args.refresh_bn)
    model, history = train(samples, config, progress=args.progress)
    model.save(args.model)
    history.write_csv(args.out or str(Path(args.model).with_suffix(".history.csv")))
    print(f"final train MSE {history.train_mse[-1]:.5g}, validation MSE {history.val_mse[-1]:.5g}",
          file=sys.stderr)
    return EXIT_OK


def _predict_sample(args) -> Sample:
    if args.config:
        cfg = load_config(args.config)
        c, g = cfg.case, cfg.case.gradation
        return Sample(c.problem.value, c.bc, g.kx, g.ky, g.kz, c.kw_bar, c.thickness_kind.value, c.a_over_h0)
    missing = [f for f in ("problem", "bc", "a_over_h0") if getattr(args, f) is None]
    if missing:
        raise UserError(f"{missing[0]}: required without --config")
    try:
        Problem(args.problem)
        Gradation(args.kx, args.ky, args.kz)
    except ValueError as exc:
        raise UserError(str(exc)) from None
    return Sample(args.problem, args.bc.upper(), args.kx, args.ky, args.kz, args.kw_bar,
                  args.plate_type, args.a_over_h0)


def cmd_predict(args) -> int:
    if not args.model or not Path(args.model).is_file():
        raise UserError(f"model: file not found: {args.model}")
    model = SurrogateModel.load(args.model)
    sample = _predict_sample(args)
    try:
        p = predict(model, sample)
    except (KeyError, ValueError) as exc:
        raise UserError(str(exc)) from None
    row = {**sample.descriptor(), "prediction": _g(p.value),
           "in_range": "yes" if p.in_range else "no", "notes": "; ".join(p.notes)}
    _emit(_csv([row], tuple(row)), args.out)
    return EXIT_OK


def _mesh_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("mesh sizes must be >= 1")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fgplate", description=__doc__.splitlines()[0].replace("``", ""))
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        p.add_argument("--out", help="output file")
        return p

    p = command("analyze", cmd_analyze, "solve one case file")
    p.add_argument("--config", required=True)
    p.add_argument("--mesh", type=_mesh_list, help="elements per side (overrides the file)")

    p = command("converge", cmd_converge, "mesh convergence study for one case file")
    p.add_argument("--config", required=True)
    p.add_argument("--mesh", type=_mesh_list, help="comma-separated element counts (default 8,16,32)")

    p = command("reproduce", cmd_reproduce, "recompute a published benchmark table")
    p.add_argument("--table", type=int, required=True)
    p.add_argument("--mesh", type=_mesh_list)

    p = command("dataset", cmd_dataset, "generate FEM-labelled surrogate samples")
    p.add_argument("--n", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mesh", type=_mesh_list)
    p.add_argument("--progress", action="store_true")

    p = command("train", cmd_train, "train the surrogate (--out sets the history CSV)")
    p.add_argument("--dataset", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--epochs", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batch-size", type=int, default=256)
    p.add_argument("--lr-schedule", choices=("constant", "cosine"), default="constant")
    p.add_argument("--refresh-bn", action="store_true", help="recompute BN statistics after every epoch")
    p.add_argument("--no-batch-norm", action="store_true")
    p.add_argument("--progress", action="store_true")

    p = command("predict", cmd_predict, "evaluate the surrogate on one case")
    p.add_argument("--model", required=True)
    p.add_argument("--config")
    p.add_argument("--problem")
    p.add_argument("--bc")
    p.add_argument("--kx", type=float, default=0.0)
    p.add_argument("--ky", type=float, default=0.0)
    p.add_argument("--kz", type=float, default=0.0)
    p.add_argument("--kw-bar", type=float, default=0.0)
    p.add_argument("--plate-type", type=int, default=1, choices=(1, 2, 3))
    p.add_argument("--a-over-h0", type=float)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UserError, ConfigError, FileNotFoundError) as exc:
        print(f"fgplate: error: {exc}", file=sys.stderr)
        return EXIT_USER
    except (SolverError, TrainingDivergedError, np.linalg.LinAlgError) as exc:
        print(f"fgplate: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"fgplate: error: {exc}", file=sys.stderr)
        return EXIT_USER


if __name__ == "__main__":
    sys.exit(main())
