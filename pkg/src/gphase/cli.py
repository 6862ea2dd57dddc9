"""Command-line front end.

Subcommands: `bound` (QFI and optimized Gaussian FI for one state),
`figure` (plot-ready CSV datasets), `verify` (invariant suites) and
`simulate` (Monte-Carlo Cramer-Rao saturation experiments).

All outputs are deterministic given the flags (plus the seed where one
applies): the embedded manifest carries no timestamp unless explicitly
requested, so identical invocations are byte-identical.

Exit codes: 0 success, 1 computation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .estimator import ExperimentConfig, run_experiment, trial_estimates
from .fisher import (
    classify_optimal_type,
    closed_form_fi,
    gaussian_fi,
    numeric_fi_oracle,
    optimal_measurement_spec,
    optimize_gaussian_fi,
    qfi,
    type_boundaries,
)
from .fock import (
    build_density_matrix,
    converged_block,
    phase_derivative,
    sld_closed_form,
    sld_spectral_convergence,
    svs_homodyne_optimality_check,
)
from .measurement import MeasurementKind, MeasurementSpec
from .states import (
    ChannelParams,
    StateParams,
    apply_thermal_channel,
    mean_photon_number,
    params_to_moments,
)

OUTPUT_DIR_ENV = "GPHASE_OUTPUT_DIR"

FIGURES = ("fig3a", "fig3b", "fig4", "fig5a", "fig5b", "fig6")
VERIFY_SUITES = ("fi", "sld", "reductions", "appendixD", "all")


@dataclass(frozen=True)
class RunManifest:
    """Provenance record embedded in (or alongside) every output."""

    command: str
    parameters: dict
    tool_version: str
    seed: int | None
    timestamp: str | None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def sha256(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()


def _manifest(args: argparse.Namespace, command: str, seed: int | None) -> RunManifest:
    skip = {"func", "command", "output", "trials_output", "timestamp"}
    params = {
        k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None
    }
    params = {k: (list(v) if isinstance(v, tuple) else v) for k, v in params.items()}
    timestamp = (
        datetime.now(timezone.utc).isoformat() if getattr(args, "timestamp", False) else None
    )
    return RunManifest(
        command=command,
        parameters=params,
        tool_version=__version__,
        seed=seed,
        timestamp=timestamp,
    )


def _resolve_output(path: str | None):
    if path is None:
        return None
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _write_text(path: str | None, text: str) -> None:
    target = _resolve_output(path)
    if target is None:
        sys.stdout.write(text)
    else:
        with open(target, "w", newline="") as fh:
            fh.write(text)


def _csv_text(manifest: RunManifest, header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write(f"# manifest-sha256: {manifest.sha256()}\r\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _fmt(x: float) -> str:
    """Stable, locale-independent numeric formatting for CSV cells."""
    return repr(float(x))


# -- state/channel flag plumbing ---------------------------------------------


def _add_state_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, default=0.0, help="|alpha|, displacement magnitude")
    parser.add_argument("--theta-c", type=float, default=0.0, help="displacement phase (rad)")
    parser.add_argument("--r", type=float, default=0.0, help="squeezing magnitude")
    parser.add_argument("--theta-s", type=float, default=0.0, help="squeezing phase (rad)")
    parser.add_argument("--nth", type=float, default=0.0, help="thermal photon number")
    parser.add_argument("--eta", type=float, default=1.0, help="channel transmission in [0, 1]")
    parser.add_argument("--ne", type=float, default=0.0, help="environment photon number")


def _state_from_args(args: argparse.Namespace) -> StateParams:
    return StateParams(args.alpha, args.theta_c, args.r, args.theta_s, args.nth)


def _channel_from_args(args: argparse.Namespace) -> ChannelParams:
    return ChannelParams(args.eta, args.ne)


# -- bound -------------------------------------------------------------------


def _spec_payload(spec: MeasurementSpec) -> dict:
    if spec.kind is MeasurementKind.HOMODYNE:
        return {"kind": "homodyne", "angle": spec.homodyne_angle}
    return {"kind": "general_dyne", "s": spec.s, "psi": spec.psi}


def cmd_bound(args: argparse.Namespace) -> int:
    probe = apply_thermal_channel(_state_from_args(args), _channel_from_args(args))
    report = optimize_gaussian_fi(probe, args.phi)
    manifest = _manifest(args, "bound", None)
    payload = {
        "state": dataclasses.asdict(probe),
        "phi": args.phi,
        "qfi": report.qfi,
        "fi": report.fi,
        "ratio": report.ratio,
        "type": report.type_used.value if report.type_used else None,
        "measurement": _spec_payload(report.spec),
        "mean_photon_number": mean_photon_number(params_to_moments(probe)),
        "manifest": manifest.to_dict(),
    }
    _write_text(args.output, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return 0


# -- figure ------------------------------------------------------------------


def _best_closed_form_fi(p: StateParams) -> float:
    return closed_form_fi(p, classify_optimal_type(p)[0])


def _trajectories(fig5: bool) -> list[tuple[str, StateParams, float]]:
    """(label, input state, n_e) for the four environment examples."""
    if fig5:
        state = StateParams(0.0, 0.0, math.asinh(1.0), 0.0, 2.0)
        n_in = 7.0
        envs = [("i", n_in + 7.0), ("ii", n_in), ("iii", 2.0), ("iv", 1.0)]
    else:
        state = StateParams(1.0, 0.0, 0.0, 0.0, 1.0)
        n_in = 2.0
        envs = [("i", n_in + 2.0), ("ii", n_in), ("iii", 1.0), ("iv", 0.0)]
    return [(f"traj_{label}", state, n_e) for label, n_e in envs]


def _figure_rows(name: str, points: int, eta_points: int) -> tuple[list[str], list[list]]:
    rows: list[list] = []
    if name == "fig4":
        header = ["n_th", "C_H", "C_F_I", "C_F_II"]
        grid = np.linspace(0.0, 3.0, points)
        grid = np.unique(np.append(grid, 1.0 / math.sqrt(2.0)))
        for n in grid:
            nu = 2.0 * n + 1.0
            c_h = 2.0 * nu * nu / (2.0 * n * n + 2.0 * n + 1.0)
            c_ii = (nu / (n + 1.0)) ** 2
            rows.append([_fmt(n), _fmt(c_h), _fmt(2.0), _fmt(c_ii)])
        return header, rows

    if name == "fig6":
        header = [
            "n_th",
            "alpha_tilde_sq_II",
            "alpha_tilde_sq_III",
            "alpha_tilde_sq_II_III",
        ]
        for n in np.linspace(0.0, 1.2, points):
            b = type_boundaries(float(n))
            crossover = b["II_III"]
            if math.isnan(crossover):
                cell = ""  # types II and III never exchange optimality here
            elif math.isinf(crossover):
                cell = "inf"
            else:
                cell = _fmt(crossover**2)
            rows.append([_fmt(n), _fmt(b["II"] ** 2), _fmt(b["III"] ** 2), cell])
        return header, rows

    fig5 = name.startswith("fig5")
    etas = np.linspace(1.0, 0.0, eta_points)
    trajectories = _trajectories(fig5)

    if name in ("fig3a", "fig5a"):
        axis = "sinh_sq_r" if fig5 else "alpha_sq"
        header = ["series", "eta", axis, "n_th", "fi"]
        primary = np.linspace(0.0, 3.0 if fig5 else 4.0, points)
        for value in primary:
            for n in np.linspace(0.0, 3.0, 31):
                if fig5:
                    p = StateParams(0.0, 0.0, math.asinh(math.sqrt(value)), 0.0, float(n))
                else:
                    p = StateParams(math.sqrt(value), 0.0, 0.0, 0.0, float(n))
                rows.append(
                    ["grid", "", _fmt(value), _fmt(n), _fmt(_best_closed_form_fi(p))]
                )
        for label, state, n_e in trajectories:
            for eta in etas:
                out = apply_thermal_channel(state, ChannelParams(float(eta), n_e))
                value = math.sinh(out.r) ** 2 if fig5 else out.alpha_mag**2
                rows.append(
                    [
                        label,
                        _fmt(eta),
                        _fmt(value),
                        _fmt(out.n_th),
                        _fmt(_best_closed_form_fi(out)),
                    ]
                )
        return header, rows

    # fig3b / fig5b: Cramer-Rao error bound versus mean photon number.
    header = ["series", "eta", "N", "delta_phi"]
    n_grid = np.linspace(0.02, 8.0, points)
    for n_mean in n_grid:
        if fig5:
            # Squeezed vacuum lower bound: N = sinh^2 r.
            fi = 8.0 * n_mean * (n_mean + 1.0)
        else:
            # Displaced vacuum lower bound: N = |alpha|^2.
            fi = 4.0 * n_mean
        rows.append(["bound", "", _fmt(n_mean), _fmt(1.0 / math.sqrt(fi))])
    for label, state, n_e in trajectories:
        for eta in etas:
            out = apply_thermal_channel(state, ChannelParams(float(eta), n_e))
            fi = _best_closed_form_fi(out)
            n_mean = mean_photon_number(params_to_moments(out))
            delta = 1.0 / math.sqrt(fi) if fi > 0.0 else math.inf
            rows.append(
                [label, _fmt(eta), _fmt(n_mean), _fmt(delta) if fi > 0.0 else "inf"]
            )
    return header, rows


def cmd_figure(args: argparse.Namespace) -> int:
    header, rows = _figure_rows(args.name, args.points, args.eta_points)
    manifest = _manifest(args, "figure", None)
    _write_text(args.output, _csv_text(manifest, header, rows))
    return 0


# -- verify ------------------------------------------------------------------


def _check(lines: list[str], label: str, value: float, tol: float) -> bool:
    ok = value < tol
    lines.append(
        f"[{'PASS' if ok else 'FAIL'}] {label}: {value:.3e} (tol {tol:.1e})"
    )
    return ok


def _verify_fi(lines: list[str]) -> bool:
    rng = np.random.default_rng(20260826)
    ok = True
    worst = 0.0
    for k in range(25):
        p = StateParams(
            float(rng.uniform(0.0, 1.2)),
            float(rng.uniform(0.0, 2.0 * math.pi)),
            float(rng.uniform(0.0, 0.9)),
            float(rng.uniform(0.0, 2.0 * math.pi)),
            float(rng.uniform(0.0, 1.5)),
        )
        phi = float(rng.uniform(0.0, 2.0 * math.pi))
        if k % 3 == 0:
            spec = MeasurementSpec.homodyne(float(rng.uniform(0.0, math.pi)))
        elif k % 3 == 1:
            spec = MeasurementSpec.heterodyne()
        else:
            spec = MeasurementSpec.general_dyne(
                float(rng.uniform(0.0, 1.2)), float(rng.uniform(0.0, 2.0 * math.pi))
            )
        exact = gaussian_fi(p, phi, spec)
        oracle = numeric_fi_oracle(p, phi, spec)
        worst = max(worst, abs(exact - oracle) / max(abs(exact), 1e-9))
    ok &= _check(lines, "gaussian_fi vs quadrature oracle, 25 random pairs", worst, 1e-5)
    return ok


def _verify_sld(lines: list[str]) -> bool:
    ok = True
    grid = [
        StateParams(0.7, 0.9, 0.0, 0.0, 0.4),
        StateParams(0.0, 0.0, 0.5, 0.6, 0.3),
        StateParams(0.7, 0.9, 0.5, 0.6, 0.3),
        StateParams(0.5, 0.3, 0.4, 1.1, 1.0),
    ]
    worst_resid = 0.0
    worst_agree = 0.0
    for p in grid:
        phi = 0.3
        rho = build_density_matrix(p, phi)
        drho = phase_derivative(rho)
        closed = sld_closed_form(p, phi)
        rep = sld_spectral_convergence(p, phi)
        for sld in (closed, rep.operator):
            res = drho.matrix - 0.5 * (
                sld.matrix @ rho.matrix + rho.matrix @ sld.matrix
            )
            block = converged_block(res)
            worst_resid = max(worst_resid, float(np.abs(block).sum(axis=0).max()))
        k = rep.converged_dim
        if k > 0:
            dev = np.linalg.norm(
                rep.operator.matrix[:k, :k] - closed.matrix[:k, :k], 2
            )
            worst_agree = max(worst_agree, float(dev))
    ok &= _check(lines, "SLD defining-equation residual (1-norm)", worst_resid, 1e-8)
    ok &= _check(
        lines, "spectral vs closed-form SLD on converged block", worst_agree, 1e-6
    )
    return ok


def _verify_reductions(lines: list[str]) -> bool:
    from .fisher import _cos_chi_type2, _fi_type1, _fi_type2, _fi_type3, _s_opt

    ok = True
    worst = 0.0
    for r in (0.3, 0.8):
        for n in (0.2, 1.0):
            sh2 = math.sinh(2.0 * r) ** 2
            nu = 2.0 * n + 1.0
            for a in (0.3, 1.0):
                # r = 0 limit of type I: the displaced-thermal maximum.
                worst = max(
                    worst, abs(_fi_type1(a, 0.0, n) - 4.0 * a * a / nu)
                )
                # n_th = 0 limits of types I and II.
                worst = max(
                    worst,
                    abs(_fi_type1(a, r, 0.0) - 4.0 * math.exp(2.0 * r) * a * a),
                )
                dsvs2 = (
                    2.0 * math.sinh(2.0 * r)
                    + (1.0 + 1.0 / math.tanh(2.0 * r)) * a * a
                ) ** 2 / 2.0
                worst = max(worst, abs(_fi_type2(a, r, 0.0) - dsvs2))
            # alpha = 0 limits of types II and III, and s_opt = r.
            worst = max(worst, abs(_fi_type2(0.0, r, n) - 2.0 * sh2))
            worst = max(
                worst, abs(_fi_type3(0.0, r, n) - (nu / (n + 1.0)) ** 2 * sh2)
            )
            worst = max(worst, abs(_s_opt(0.0, r, n) - r))
            worst = max(
                worst,
                abs(_cos_chi_type2(0.0, r, 0.0) - math.tanh(2.0 * r)),
            )
    ok &= _check(lines, "closed-form limit reductions", worst, 1e-12)
    return ok


def _verify_appendix_d(lines: list[str]) -> bool:
    ok = True
    worst_imag = 0.0
    worst_dev = 0.0
    for r in (0.3, 0.8):
        rep = svs_homodyne_optimality_check(r, 0.3, np.linspace(-4.0, 4.0, 81))
        worst_imag = max(worst_imag, rep.max_abs_imag)
        worst_dev = max(worst_dev, rep.max_abs_real_dev)
    ok &= _check(lines, "homodyne overlap imaginary part", worst_imag, 1e-10)
    ok &= _check(lines, "homodyne overlap vs closed form", worst_dev, 1e-8)
    return ok


def cmd_verify(args: argparse.Namespace) -> int:
    suites = {
        "fi": _verify_fi,
        "sld": _verify_sld,
        "reductions": _verify_reductions,
        "appendixD": _verify_appendix_d,
    }
    selected = list(suites) if args.suite == "all" else [args.suite]
    lines: list[str] = []
    ok = True
    for name in selected:
        lines.append(f"suite: {name}")
        ok &= suites[name](lines)
    lines.append("result: " + ("PASS" if ok else "FAIL"))
    _write_text(args.output, "\n".join(lines) + "\n")
    return 0 if ok else 1


# -- simulate ----------------------------------------------------------------


def _measurement_from_args(
    args: argparse.Namespace, probe: StateParams, phi: float
) -> MeasurementSpec:
    if args.measurement == "homodyne":
        if args.angle is None:
            raise SystemExit2("--angle is required for --measurement homodyne")
        return MeasurementSpec.homodyne(args.angle)
    if args.measurement == "heterodyne":
        return MeasurementSpec.heterodyne()
    if args.measurement == "general-dyne":
        if args.s is None or args.psi is None:
            raise SystemExit2("--s and --psi are required for general-dyne")
        return MeasurementSpec.general_dyne(args.s, args.psi)
    return optimal_measurement_spec(probe, phi, classify_optimal_type(probe)[0])


class SystemExit2(SystemExit):
    def __init__(self, message: str) -> None:
        sys.stderr.write(f"error: {message}\n")
        super().__init__(2)


def cmd_simulate(args: argparse.Namespace) -> int:
    probe = apply_thermal_channel(_state_from_args(args), _channel_from_args(args))
    spec = _measurement_from_args(args, probe, args.phi)
    config = ExperimentConfig(
        state=_state_from_args(args),
        channel=_channel_from_args(args),
        phi_true=args.phi,
        spec=spec,
        shots_M=args.shots,
        trials=args.trials,
        seed=args.seed,
        search_halfwidth=args.halfwidth,
    )
    report = run_experiment(config)
    manifest = _manifest(args, "simulate", args.seed)
    payload = {
        "report": dataclasses.asdict(report),
        "measurement": _spec_payload(spec),
        "manifest": manifest.to_dict(),
    }
    _write_text(args.output, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    if args.trials_output is not None:
        estimates, _ = trial_estimates(config)
        rows = [[str(i), _fmt(est)] for i, est in enumerate(estimates)]
        _write_text(
            args.trials_output, _csv_text(manifest, ["trial", "estimate"], rows)
        )
    return 0


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gphase",
        description="Cramer-Rao bounds and optimal Gaussian measurements "
        "for single-mode phase estimation.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_bound = sub.add_parser("bound", help="QFI and optimized Gaussian FI for one state")
    _add_state_flags(p_bound)
    p_bound.add_argument("--phi", type=float, default=0.0, help="encoded phase (rad)")
    p_bound.add_argument("--output", help="output file (default stdout)")
    p_bound.add_argument("--timestamp", action="store_true", help="include a timestamp in the manifest")
    p_bound.set_defaults(func=cmd_bound)

    p_fig = sub.add_parser("figure", help="emit a plot-ready CSV dataset")
    p_fig.add_argument("name", choices=FIGURES)
    p_fig.add_argument("--points", type=int, default=121, help="primary-axis sample count")
    p_fig.add_argument("--eta-points", type=int, default=21, help="trajectory samples in eta")
    p_fig.add_argument("--output", help="output file (default stdout)")
    p_fig.add_argument("--timestamp", action="store_true", help="include a timestamp in the manifest")
    p_fig.set_defaults(func=cmd_figure)

    p_ver = sub.add_parser("verify", help="run an invariant suite")
    p_ver.add_argument("suite", choices=VERIFY_SUITES)
    p_ver.add_argument("--output", help="output file (default stdout)")
    p_ver.set_defaults(func=cmd_verify)

    p_sim = sub.add_parser("simulate", help="Monte-Carlo Cramer-Rao saturation run")
    _add_state_flags(p_sim)
    p_sim.add_argument("--phi", type=float, default=0.0, help="true phase (rad)")
    p_sim.add_argument(
        "--measurement",
        choices=("optimal", "homodyne", "heterodyne", "general-dyne"),
        default="optimal",
    )
    p_sim.add_argument("--angle", type=float, help="homodyne quadrature angle (rad)")
    p_sim.add_argument("--s", type=float, help="general-dyne seed squeezing")
    p_sim.add_argument("--psi", type=float, help="general-dyne seed phase (rad)")
    p_sim.add_argument("--shots", type=int, required=True, help="samples per trial")
    p_sim.add_argument("--trials", type=int, required=True)
    p_sim.add_argument("--seed", type=int, required=True)
    p_sim.add_argument("--halfwidth", type=float, default=0.5, help="ML search half-width (rad)")
    p_sim.add_argument("--output", help="JSON report file (default stdout)")
    p_sim.add_argument("--trials-output", help="CSV of per-trial estimates")
    p_sim.add_argument("--timestamp", action="store_true", help="include a timestamp in the manifest")
    p_sim.set_defaults(func=cmd_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
