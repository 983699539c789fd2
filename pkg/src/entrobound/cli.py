"""Command-line surface: scenario ingestion, bound sweeps, steering scans.

Subcommands: ``bound``, ``sweep-random``, ``sweep-qutrit``, ``steering``,
``validate``.  Scenario files are JSON; sweep outputs are CSV with a leading
``#`` comment line naming the columns.  Complex numbers serialise as
``[re, im]`` pairs and floats are written with 17 significant digits, so
re-running a command with the same flags and seed reproduces the output
byte for byte.  Exit codes: 0 success, 2 validation error, 3 numerical
diagnostic.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import ensembles
from .bounds import compile_bound_report
from .qmat import (
    DensityState,
    DiagnosticError,
    Povm,
    ValidationError,
    WeightedEnsemble,
    validate_ensemble,
)
from .steering import noise_threshold, optimize_weights
from .viewop import view_report

SEED_ENV_VAR = "ENTROBOUND_SEED"

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DIAGNOSTIC = 3


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _parse_alpha(text: str) -> float:
    if text.strip().lower() in {"inf", "infinity", "oo"}:
        return math.inf
    try:
        val = float(text)
    except ValueError as exc:
        raise ValidationError(f"bad Renyi order {text!r}") from exc
    if val != 1.0 and val < 2.0:
        raise ValidationError(f"Renyi order must be 1, >= 2 or inf, got {text!r}")
    return val


def _matrix_from_json(rows) -> np.ndarray:
    try:
        arr = np.asarray(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad matrix encoding: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValidationError(
            f"matrix must be a list of rows of [re, im] pairs, got shape {arr.shape}"
        )
    return arr[:, :, 0] + 1j * arr[:, :, 1]


def _matrix_to_json(m: np.ndarray):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, complex)]


def _family_from_descriptor(desc: dict) -> WeightedEnsemble:
    if not isinstance(desc, dict) or "name" not in desc:
        raise ValidationError("family descriptor must be an object with a 'name'")
    name = desc["name"]
    params = {k: v for k, v in desc.items() if k != "name"}
    try:
        if name == "pauli_triple":
            return ensembles.pauli_triple(**params)
        if name == "qubit_family":
            return ensembles.qubit_family(float(params["beta1"]), float(params["beta2"]))
        if name == "mub":
            return ensembles.mub_family(int(params["d"]), int(params["count"]))
        if name == "qutrit_four":
            return ensembles.qutrit_four_bases(
                float(params["beta"]), params.get("variant", "printed")
            )
        if name == "haar":
            return ensembles.haar_random_bases(
                int(params["d"]), int(params["count"]), int(params["seed"])
            )
    except KeyError as exc:
        raise ValidationError(f"family {name!r} is missing parameter {exc}") from exc
    raise ValidationError(f"unknown measurement family {name!r}")


def _load_scenario_document(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read scenario file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"scenario file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError("scenario file must contain a JSON object")
    return doc


def load_scenario(path: str):
    """Parse a scenario file into ``(ensemble, state or None)``."""
    doc = _load_scenario_document(path)
    if ("povms" in doc) == ("family" in doc):
        raise ValidationError("scenario must contain exactly one of 'povms' or 'family'")

    if "family" in doc:
        ensemble = _family_from_descriptor(doc["family"])
        if "weights" in doc:
            ensemble = WeightedEnsemble(ensemble.povms, np.asarray(doc["weights"], float))
    else:
        povms = [
            Povm(tuple(_matrix_from_json(eff) for eff in effects))
            for effects in doc["povms"]
        ]
        weights = doc.get("weights")
        if weights is None:
            ensemble = WeightedEnsemble.equal_weights(povms)
        else:
            ensemble = WeightedEnsemble(tuple(povms), np.asarray(weights, float))

    if "dimension" in doc and int(doc["dimension"]) != ensemble.d:
        raise ValidationError(
            f"declared dimension {doc['dimension']} != actual dimension {ensemble.d}"
        )

    state = None
    if doc.get("state") is not None:
        state = DensityState(_matrix_from_json(doc["state"]))
    return ensemble, state


def _open_out(path: str):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _write_csv(path: str, comment: str, header: list, rows: list) -> None:
    out, close = _open_out(path)
    try:
        out.write(f"# {comment}\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])
    finally:
        if close:
            out.close()


def _default_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get(SEED_ENV_VAR, "0"))


def cmd_bound(args) -> int:
    ensemble, state = load_scenario(args.scenario)
    if args.state_independent:
        state = None
    alphas = [_parse_alpha(a) for a in args.alpha] if args.alpha else [1.0, 2.0, math.inf]
    report = compile_bound_report(
        ensemble,
        state=state,
        alphas=alphas,
        include_optimal=not args.no_optimal,
        restarts=args.restarts,
        seed=_default_seed(args),
    )
    if args.csv:
        flat: list[tuple[str, object]] = [
            ("d", report.d),
            ("outcomes", report.n_outcomes),
            ("measurements", report.n_measurements),
            ("i_com", report.i_com),
            ("s_rho", report.s_rho),
            ("g_avg_norm", report.g_avg_norm),
            ("g_tot_norm", report.g_tot_norm),
            ("x_tot", report.exclusivity),
            ("q_1", report.q_one),
            ("q_s", report.q_s),
            ("q_lmf", report.q_lmf),
            ("q_scb", report.q_scb),
        ]
        for label, value in sorted(report.q_alpha.items()):
            flat.append((f"q_alpha_{label}", value))
        for label, value in sorted(report.b_alpha.items()):
            flat.append((f"b_alpha_{label}", value))
        if report.q_mu:
            for label, value in sorted(report.q_mu.items()):
                flat.append((f"q_mu_{label.replace(',', '_')}", value))
        _write_csv(
            args.out,
            "entrobound bound v1: averages q_1/q_alpha/b_alpha, sums q_s/q_mu/q_lmf/q_scb",
            [k for k, _ in flat],
            [[v for _, v in flat]],
        )
    else:
        out, close = _open_out(args.out)
        try:
            json.dump(report.to_dict(), out, indent=2, sort_keys=True, allow_nan=True)
            out.write("\n")
        finally:
            if close:
                out.close()
    return EXIT_OK


def cmd_sweep_random(args) -> int:
    if args.d < 2 or args.count < 1 or args.trials < 0 or args.restarts < 1:
        raise ValidationError("flag out of range: need d>=2, count>=1, trials>=0, restarts>=1")
    seed = _default_seed(args)
    alphas = [_parse_alpha(a) for a in args.alphas.split(",")] if args.alphas else [1.0, 2.0]
    i_com = 1.0 - 1.0 / args.d

    header = ["trial", "x_tot", "g_avg_norm", "q_1", "q_2", "q_s", "q_lmf", "q_scb"]
    header += [f"b_{'inf' if math.isinf(a) else int(a)}" for a in alphas]
    rows = []
    children = np.random.SeedSequence(seed).spawn(max(args.trials, 1))
    from .bounds import (  # local import keeps module load light for --help
        bound_q_alpha,
        bound_q_lmf_best,
        bound_q_one,
        bound_q_s,
        bound_q_scb,
        numerical_optimal_bound,
    )

    for trial in range(args.trials):
        ens_seed, opt_seed = children[trial].spawn(2)
        ensemble = ensembles.haar_random_bases(args.d, args.count, ens_seed)
        report = view_report(ensemble)
        theta = ensemble.n_measurements
        row = [
            trial,
            report.exclusivity,
            report.g_avg_norm,
            theta * bound_q_one(ensemble, i_com),
            theta * bound_q_alpha(ensemble, i_com, 2.0),
            bound_q_s(ensemble.povms, i_com) if theta >= 2 else None,
            bound_q_lmf_best(ensemble.povms, 0.0) if theta >= 2 else None,
            bound_q_scb(ensemble.povms, 0.0) if theta >= 2 else None,
        ]
        opt_rng = np.random.default_rng(opt_seed)
        for a in alphas:
            b = numerical_optimal_bound(
                ensemble, a, restarts=args.restarts, seed=int(opt_rng.integers(2**31))
            )
            row.append(theta * b.value)
        rows.append(row)

    comment = (
        "entrobound sweep-random v1: state-independent bounds, sum form "
        f"(q_1,q_2,b_* scaled by measurement count); d={args.d} count={args.count} "
        f"trials={args.trials} restarts={args.restarts} seed={seed}"
    )
    _write_csv(args.out, comment, header, rows)
    return EXIT_OK


def _parse_grid(args) -> list:
    if args.betas:
        grid = [float(x) for x in args.betas.split(",") if x.strip()]
    else:
        if args.grid_points < 0:
            raise ValidationError("grid point count must be nonnegative")
        grid = list(np.linspace(0.0, math.pi / 4.0, args.grid_points))
    for beta in grid:
        if not (-1e-12 <= beta <= math.pi / 4.0 + 1e-12):
            raise ValidationError(f"beta {beta!r} outside [0, pi/4]")
    return grid


def cmd_sweep_qutrit(args) -> int:
    from .bounds import bound_q_s, bound_q_scb

    grid = _parse_grid(args)
    i_com = 1.0 - 1.0 / 3.0
    rows = []
    for beta in grid:
        ensemble = ensembles.qutrit_four_bases(beta, variant=args.variant)
        report = view_report(ensemble)
        q_s = bound_q_s(ensemble.povms, i_com)
        projective = all(p.is_rank_one_projective() for p in ensemble.povms)
        q_scb = bound_q_scb(ensemble.povms, 0.0) if projective else None
        rows.append([beta, report.exclusivity, q_s, q_scb])
    comment = f"entrobound sweep-qutrit v1: variant={args.variant} points={len(grid)}"
    _write_csv(args.out, comment, ["beta", "x_tot", "q_s", "q_scb"], rows)
    return EXIT_OK


def _steering_points(args) -> list:
    points = []
    if args.points:
        for chunk in args.points.split(";"):
            if not chunk.strip():
                continue
            parts = chunk.split(",")
            if len(parts) != 2:
                raise ValidationError(f"bad steering point {chunk!r}, expected 'b1,b2'")
            points.append((float(parts[0]), float(parts[1])))
    elif args.beta2_grid is not None:
        if args.beta2_grid < 0:
            raise ValidationError("grid point count must be nonnegative")
        points = [(args.beta1, b2) for b2 in np.linspace(0.0, args.beta2_max, args.beta2_grid)]
    return points


def cmd_steering(args) -> int:
    alpha = _parse_alpha(args.alpha)
    seed = _default_seed(args)
    rows = []
    for beta1, beta2 in _steering_points(args):
        family = ensembles.qubit_family(beta1, beta2)
        theta = family.n_measurements
        equal = np.full(theta, 1.0 / theta)
        row: list = [beta1, beta2]
        try:
            eta_equ = noise_threshold(family.povms, equal, alpha=alpha, tol=args.tol)
            status = "ok" if eta_equ is not None else "no-threshold"
            row.append(eta_equ)
            if args.optimize_weights:
                weights, eta_opt = optimize_weights(
                    family.povms, alpha=alpha, restarts=args.restarts, tol=args.tol, seed=seed
                )
                row.extend([eta_opt, *weights])
            else:
                row.extend([None, None, None, None])
        except DiagnosticError as exc:
            status = f"diagnostic: {exc}"
            row.extend([None, None, None, None, None])
        row.append(status)
        rows.append(row)
    comment = (
        f"entrobound steering v1: alpha={args.alpha} tol={_fmt(args.tol)} "
        f"optimize={bool(args.optimize_weights)} seed={seed}"
    )
    header = ["beta1", "beta2", "eta_equ", "eta_opt", "w_1", "w_2", "w_3", "status"]
    _write_csv(args.out, comment, header, rows)
    return EXIT_OK


def cmd_validate(args) -> int:
    doc = _load_scenario_document(args.scenario)
    if "family" in doc:
        # Families construct validated ensembles; surface any failure as text.
        try:
            ensemble = _family_from_descriptor(doc["family"])
            diag = validate_ensemble(ensemble)
        except ValidationError as exc:
            diag_dict = {"valid": False, "problems": [str(exc)], "ete": []}
            print(json.dumps(diag_dict, indent=2, sort_keys=True))
            return EXIT_VALIDATION
    else:
        if "povms" not in doc:
            raise ValidationError("scenario must contain 'povms' or 'family'")
        povms = [[_matrix_from_json(eff) for eff in effects] for effects in doc["povms"]]
        diag = validate_ensemble(povms, doc.get("weights"))
    print(json.dumps(diag.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK if diag.ok else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entrobound",
        description="Entropic uncertainty bounds for weighted POVM ensembles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bound = sub.add_parser("bound", help="evaluate all bounds for one scenario file")
    p_bound.add_argument("scenario", help="scenario JSON file")
    p_bound.add_argument("--alpha", action="append", help="Renyi order (repeatable; 1, >=2 or inf)")
    p_bound.add_argument("--state-independent", action="store_true",
                         help="ignore any state in the file and use the pure-state form")
    p_bound.add_argument("--csv", action="store_true", help="emit CSV instead of JSON")
    p_bound.add_argument("--no-optimal", action="store_true",
                         help="skip the numerical optimal bounds")
    p_bound.add_argument("--restarts", type=int, default=32)
    p_bound.add_argument("--seed", type=int, default=None)
    p_bound.add_argument("--out", default="-")
    p_bound.set_defaults(func=cmd_bound)

    p_rand = sub.add_parser("sweep-random", help="bounds for random basis sets, one CSV row per trial")
    p_rand.add_argument("--d", type=int, required=True)
    p_rand.add_argument("--count", type=int, required=True)
    p_rand.add_argument("--trials", type=int, required=True)
    p_rand.add_argument("--alphas", default="1,2", help="orders for the optimal bounds")
    p_rand.add_argument("--restarts", type=int, default=16)
    p_rand.add_argument("--seed", type=int, default=None)
    p_rand.add_argument("--out", default="-")
    p_rand.set_defaults(func=cmd_sweep_random)

    p_qutrit = sub.add_parser("sweep-qutrit", help="four-basis qutrit family sweep")
    p_qutrit.add_argument("--grid-points", type=int, default=26)
    p_qutrit.add_argument("--betas", default=None, help="comma-separated beta values in [0, pi/4]")
    p_qutrit.add_argument("--variant", default="printed", choices=["printed", "distinct"])
    p_qutrit.add_argument("--out", default="-")
    p_qutrit.set_defaults(func=cmd_sweep_qutrit)

    p_steer = sub.add_parser("steering", help="noise thresholds for qubit observable triples")
    p_steer.add_argument("--points", default=None, help="semicolon-separated 'beta1,beta2' pairs")
    p_steer.add_argument("--beta1", type=float, default=0.0)
    p_steer.add_argument("--beta2-grid", type=int, default=None, help="points on a beta2 grid")
    p_steer.add_argument("--beta2-max", type=float, default=math.pi / 3.0)
    p_steer.add_argument("--alpha", default="inf")
    p_steer.add_argument("--optimize-weights", action="store_true")
    p_steer.add_argument("--restarts", type=int, default=32)
    p_steer.add_argument("--tol", type=float, default=1e-4)
    p_steer.add_argument("--seed", type=int, default=None)
    p_steer.add_argument("--out", default="-")
    p_steer.set_defaults(func=cmd_steering)

    p_val = sub.add_parser("validate", help="diagnose a scenario file without computing bounds")
    p_val.add_argument("scenario")
    p_val.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        json.dump({"error": str(exc), "kind": "validation"}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_VALIDATION
    except DiagnosticError as exc:
        json.dump({"error": str(exc), "kind": "diagnostic"}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_DIAGNOSTIC


if __name__ == "__main__":
    sys.exit(main())
