"""Batch command line: simulate, decompose, regress, differentiate, verify.

Every subcommand reads/writes CSV plus a summary.json into an output
directory. Exit codes: 0 success, 2 input or format problem, 3 an
estimator could not produce a result (empty neighborhoods), 4 I/O
failure while writing.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from .derivative import FunctionalGradientEstimator
from .errors import (
    DegenerateSpectrum,
    EmptyNeighborhood,
    EmptyPairNeighborhood,
    EmptySample,
    FormatError,
    InsufficientSample,
    InsufficientTimepoints,
    MissingComponent,
    ZeroDifference,
    ZeroGradient,
)
from .fpca import Sample, fit_eigensystem
from .grid import Curve, Grid
from .ingest import (
    ReportBundle,
    export_report,
    growth_rates,
    load_curves_csv,
    load_longitudinal,
    load_responses_csv,
    save_curves_csv,
    save_responses_csv,
)
from .regression import FunctionalKernelRegression
from .simulate import (
    NORM_MAPS,
    FunctionalSpec,
    ProcessSpec,
    gen_response,
    preset_eigenvalues,
    sample_process,
)
from .smallball import SmallBallParams, mc_small_ball, rate_bound, small_ball_asymptote

_INPUT_ERRORS = (
    FormatError,
    InsufficientTimepoints,
    ValueError,
    FileNotFoundError,
    IsADirectoryError,
    json.JSONDecodeError,
)
_ESTIMATION_ERRORS = (
    EmptyNeighborhood,
    EmptyPairNeighborhood,
    ZeroDifference,
    DegenerateSpectrum,
    InsufficientSample,
    EmptySample,
    ZeroGradient,
    MissingComponent,
)


def _load_xy(curves_path: str, responses_path: str) -> tuple[Sample, np.ndarray]:
    sample = load_curves_csv(curves_path)
    ids, y = load_responses_csv(responses_path)
    if sample.ids is not None and ids != sample.ids:
        raise FormatError("response ids do not match curve ids (same order required)")
    return sample, y


def _resolve_point(sample: Sample, at: str) -> tuple[str, np.ndarray]:
    if at == "mean":
        return "mean", sample.values.mean(axis=0)
    try:
        idx = int(at)
    except ValueError as exc:
        raise FormatError(f"--at must be 'mean', 'all' or an index, got {at!r}") from exc
    if not 0 <= idx < sample.n:
        raise FormatError(f"--at index {idx} outside 0..{sample.n - 1}")
    name = sample.ids[idx] if sample.ids is not None else f"c{idx + 1}"
    return name, sample.values[idx]


def _parse_functional(text: str, process: ProcessSpec) -> FunctionalSpec:
    cfg = json.loads(text)
    kind = cfg.get("kind")
    if kind == "linear":
        coeffs = np.asarray(cfg.get("slope_coeffs", []), dtype=float)
        if len(coeffs) > process.n_basis:
            raise FormatError("slope has more coefficients than basis elements")
        slope = Curve(process.grid, coeffs @ process.basis[: len(coeffs)])
        return FunctionalSpec(
            kind="linear", intercept=float(cfg.get("intercept", 0.0)), slope=slope
        )
    if kind == "quadratic":
        return FunctionalSpec(
            kind="quadratic", quad_coeffs=np.asarray(cfg["coeffs"], dtype=float)
        )
    if kind == "norm-nonlinear":
        name = cfg.get("map", "identity")
        if name not in NORM_MAPS:
            raise FormatError(f"unknown norm map {name!r}; choose from {sorted(NORM_MAPS)}")
        f, fprime = NORM_MAPS[name]
        return FunctionalSpec(kind="norm-nonlinear", norm_map=f, norm_map_deriv=fprime)
    raise FormatError(f"unknown functional kind {kind!r}")


def cmd_fpca(args) -> int:
    sample = load_curves_csv(args.input)
    eig = fit_eigensystem(sample, fve_threshold=args.fve)
    bundle = ReportBundle(
        eigen=eig,
        sample_ids=sample.ids,
        summary={
            "command": "fpca",
            "input": args.input,
            "fve_threshold": args.fve,
            "n_components": eig.n_components,
            "n_curves": sample.n,
            "time_range": list(sample.time_range) if sample.time_range else None,
        },
    )
    export_report(bundle, args.out)
    print(f"fpca: {eig.n_components} components, outputs in {args.out}")
    return 0


def cmd_fit(args) -> int:
    sample, y = _load_xy(args.input, args.responses)
    bandwidth = "auto" if args.bandwidth == "auto" else float(args.bandwidth)
    reg = FunctionalKernelRegression(kernel=args.kernel, bandwidth=bandwidth)
    reg.fit(sample, y)
    name, point = _resolve_point(sample, args.at)
    estimate = reg.predict_curve(Curve(sample.grid, point))
    bundle = ReportBundle(
        summary={
            "command": "fit",
            "input": args.input,
            "responses": args.responses,
            "kernel": args.kernel,
            "bandwidth": reg.bandwidth_,
            "at": name,
            "estimate": estimate,
        }
    )
    export_report(bundle, args.out)
    print(f"fit: estimate at {name} = {estimate:.6g} (h = {reg.bandwidth_:.6g})")
    return 0


def cmd_derive(args) -> int:
    sample, y = _load_xy(args.input, args.responses)
    est = FunctionalGradientEstimator(
        n_components=args.components,
        h1="auto" if args.h1 == "auto" else float(args.h1),
        h2="auto" if args.h2 == "auto" else float(args.h2),
        kernel=args.kernel,
    )
    est.fit(sample, y)
    gradients = []
    if args.at == "all":
        ids = sample.ids or [f"c{i + 1}" for i in range(sample.n)]
        for name, row in zip(ids, sample.values):
            gradients.append((name, est.gradient_at(row)))
        gradients.append(("mean", est.gradient_at_mean()))
    else:
        name, point = _resolve_point(sample, args.at)
        gradients.append((name, est.gradient_at(point)))
    bundle = ReportBundle(
        eigen=est.eigensystem_,
        sample_ids=sample.ids,
        gradients=gradients,
        summary={
            "command": "derive",
            "input": args.input,
            "responses": args.responses,
            "components": est.eigensystem_.n_components,
            "kernel": args.kernel,
            "bandwidths": {"h1": est.h1_, "h2": args.h2, "q1": est.q1, "q2": est.q2},
            "at": args.at,
        },
    )
    export_report(bundle, args.out)
    absent = sum(int(e.absent.sum()) for _, e in gradients)
    print(
        f"derive: {len(gradients)} evaluation points, "
        f"{est.eigensystem_.n_components} components, {absent} absent entries"
    )
    return 0


def cmd_simulate(args) -> int:
    grid = Grid.uniform(args.m)
    eigenvalues = preset_eigenvalues(args.preset, args.k_true)
    process = ProcessSpec(grid=grid, eigenvalues=eigenvalues)
    sample = sample_process(process, args.n, args.seed)
    fspec = _parse_functional(args.functional, process)
    y = gen_response(sample, fspec, args.sigma, args.seed, process=process)
    os.makedirs(args.out, exist_ok=True)
    names = [f"c{i + 1}" for i in range(sample.n)]
    save_curves_csv(os.path.join(args.out, "curves.csv"), sample, names=names)
    save_responses_csv(os.path.join(args.out, "y.csv"), names, y)
    with open(os.path.join(args.out, "summary.json"), "w") as fh:
        json.dump(
            {
                "command": "simulate",
                "preset": args.preset,
                "eigenvalues": [float(v) for v in eigenvalues],
                "n": args.n,
                "m": args.m,
                "sigma": args.sigma,
                "seed": args.seed,
                "functional": json.loads(args.functional),
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    print(f"simulate: wrote {sample.n} curves to {args.out}")
    return 0


def cmd_smallball(args) -> int:
    params = SmallBallParams(B=args.B, beta=args.beta, b=args.b)
    u_grid = [float(tok) for tok in args.u_grid.split(",") if tok]
    if not u_grid:
        raise FormatError("--u-grid must list at least one radius")
    j = np.arange(1, args.j_trunc + 1, dtype=float)
    eigenvalues = np.exp(-args.B * j**args.beta)
    rows = []
    for u in u_grid:
        mc = mc_small_ball(eigenvalues, args.mc, u, args.seed)
        asym = small_ball_asymptote(u, params)
        ratio = float(np.log(mc) / np.log(asym)) if 0 < mc < 1 else float("nan")
        rows.append((u, mc, asym, ratio))
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "smallball.csv"), "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["u", "mc_probability", "asymptote", "log_ratio"])
        for r in rows:
            out.writerow([format(v, ".17g") for v in r])
    with open(os.path.join(args.out, "summary.json"), "w") as fh:
        json.dump(
            {
                "command": "smallball",
                "B": args.B,
                "beta": args.beta,
                "b": args.b,
                "j_trunc": args.j_trunc,
                "mc": args.mc,
                "seed": args.seed,
                "rate_bound_n1000": rate_bound(1000, 1.0, params),
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    for u, mc, asym, ratio in rows:
        print(f"smallball: u={u:g} mc={mc:.3g} asymptote={asym:.3g} log-ratio={ratio:.3f}")
    return 0


def cmd_growth_demo(args) -> int:
    table = load_longitudinal(args.heights, args.ages)
    cut = args.predictor_max_age
    keep = table.ages <= cut
    if keep.sum() < 3:
        raise InsufficientTimepoints(f"fewer than three ages at or below {cut}")
    predictor = type(table)(
        ages=table.ages[keep], heights=table.heights[:, keep], ids=table.ids
    )
    rates = growth_rates(predictor)
    response_col = int(np.argmax(table.ages)) if args.response_age is None else int(
        np.argmin(np.abs(table.ages - args.response_age))
    )
    y = table.heights[:, response_col]

    est = FunctionalGradientEstimator(fve_threshold=args.fve, q1=args.q1)
    est.fit(rates, y)
    gradients = [
        (name, est.gradient_at(row)) for name, row in zip(rates.ids, rates.values)
    ]
    gradients.append(("mean", est.gradient_at_mean()))
    eig = est.eigensystem_
    bundle = ReportBundle(
        eigen=eig,
        sample_ids=rates.ids,
        gradients=gradients,
        summary={
            "command": "growth-demo",
            "heights": args.heights,
            "ages": args.ages,
            "fve_threshold": args.fve,
            "n_components": eig.n_components,
            "response_age": float(table.ages[response_col]),
            "predictor_max_age": cut,
            "bandwidths": {"h1": est.h1_, "q1": est.q1, "q2": est.q2},
            "rate_time_range": list(rates.time_range),
        },
    )
    export_report(bundle, args.out)
    shares = eig.eigenvalues / eig.eigenvalues.sum() * eig.fve[-1]
    print(
        f"growth-demo: {eig.n_components} components, "
        f"cumulative FVE {eig.fve[-1]:.4f}, first share {shares[0]:.3f}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="funcgrad",
        description="Scalar-on-function regression and gradient-field estimation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fpca", help="decompose a curves file into principal components")
    p.add_argument("--input", required=True)
    p.add_argument("--fve", type=float, default=0.995)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fpca)

    p = sub.add_parser("fit", help="kernel regression of responses on curves")
    p.add_argument("--input", required=True)
    p.add_argument("--responses", required=True)
    p.add_argument("--kernel", default="quadratic", choices=["uniform", "triangular", "quadratic"])
    p.add_argument("--bandwidth", default="auto")
    p.add_argument("--at", default="mean", help="'mean' or a 0-based curve index")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("derive", help="estimate gradient components")
    p.add_argument("--input", required=True)
    p.add_argument("--responses", required=True)
    p.add_argument("--components", type=int, default=None)
    p.add_argument("--h1", default="auto")
    p.add_argument("--h2", default="auto")
    p.add_argument("--kernel", default="quadratic", choices=["uniform", "triangular", "quadratic"])
    p.add_argument("--at", default="all", help="'all', 'mean' or a 0-based curve index")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("simulate", help="draw a synthetic dataset with known truth")
    p.add_argument("--preset", required=True, help="e.g. expdecay-b2-beta1 or poly-a2")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--m", type=int, default=101)
    p.add_argument("--k-true", type=int, default=8, dest="k_true")
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument(
        "--functional",
        default='{"kind": "linear", "intercept": 0.0, "slope_coeffs": [1.5, -0.5]}',
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("smallball", help="compare Monte Carlo small-ball mass to the asymptote")
    p.add_argument("--B", type=float, default=2.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--u-grid", default="0.5,0.3,0.2,0.1", dest="u_grid")
    p.add_argument("--j-trunc", type=int, default=25, dest="j_trunc")
    p.add_argument("--mc", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_smallball)

    p = sub.add_parser("growth-demo", help="difference-quotient rates, components, gradients")
    p.add_argument("--heights", required=True)
    p.add_argument("--ages", required=True)
    p.add_argument("--fve", type=float, default=0.995)
    p.add_argument("--predictor-max-age", type=float, default=10.0, dest="predictor_max_age")
    p.add_argument("--response-age", type=float, default=None, dest="response_age")
    p.add_argument(
        "--q1",
        type=float,
        default=0.9,
        help="proximity-bandwidth quantile; generous default keeps every subject's "
        "pair neighborhood populated at small n",
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_growth_demo)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _ESTIMATION_ERRORS as exc:
        print(f"estimation failed: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
