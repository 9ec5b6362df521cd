"""Command-line front end for the covert-sensing toolkit.

Subcommands mirror the library surface: closed-form and numeric QFI (`qfi`),
covert-sensing constants (`bounds`), the covert photon budget (`budget`),
the heterodyne estimation Monte Carlo (`simulate-estimation`), the
photon-counting adversary (`simulate-adversary`), the exact discrimination
error (`exact-pe`), and the square-root-law sweep (`sweep`).

Outputs are CSV or JSON with an embedded header block (schema=1, tool
version, resolved config, seed); identical config and seed produce
byte-identical files regardless of COVERT_SENSE_THREADS. Exit codes:
0 success, 2 validation error, 3 numerical failure, 4 output I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

from . import __version__
from ._output import render_csv, render_json
from .covertness import (
    AdversaryModel,
    VarianceConvention,
    chebyshev_detector,
    covert_budget,
    detection_error_lower_bound,
)
from .errors import (
    CovertSenseError,
    DomainError,
    InvalidArgumentError,
)
from .gaussian import ChannelParams
from .metrology import (
    ProbeKind,
    build_qfi_report,
    covert_constants,
    probe_moment_spec,
)
from .simulation import (
    EstimationConfig,
    Modulation,
    exact_discrimination_error,
    simulate_detection,
    simulate_estimation,
    sweep_scaling,
)

COMMANDS = (
    "qfi",
    "bounds",
    "budget",
    "simulate-estimation",
    "simulate-adversary",
    "exact-pe",
    "sweep",
)


@dataclass
class RunConfig:
    """A fully resolved CLI invocation."""

    command: str
    parameters: dict
    output_path: str | None
    format: str
    seed: int

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "output_path": self.output_path,
            "format": self.format,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return cls(
            command=data["command"],
            parameters=dict(data["parameters"]),
            output_path=data["output_path"],
            format=data["format"],
            seed=int(data["seed"]),
        )


def _int_like(text: str) -> int:
    """Integer flag value, accepting scientific shorthand such as 1e5."""
    value = float(text)
    rounded = round(value)
    if abs(value - rounded) > 1e-9 * max(1.0, abs(value)):
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    return int(rounded)


def _int_list(text: str) -> list[int]:
    return [_int_like(part) for part in text.split(",") if part]


def _float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covert-sense",
        description="Covert optical phase sensing: bounds and Monte Carlo.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--seed", type=_int_like, default=0)

    channel = argparse.ArgumentParser(add_help=False)
    channel.add_argument("--eta", type=float, required=True)
    channel.add_argument("--nbar-b", type=float, required=True)

    p = sub.add_parser("qfi", parents=[common, channel],
                       help="closed-form and numeric QFI for one probe")
    p.add_argument("--probe", choices=("coherent", "tmsv"), required=True)
    p.add_argument("--nbar-s", type=float, required=True)
    p.add_argument("--theta0", type=float, default=0.0)
    p.add_argument("--step", type=float, default=None,
                   help="finite-difference step (default: adaptive)")
    p.add_argument("--n", type=_int_like, default=1,
                   help="mode count for the MSE lower bound")

    p = sub.add_parser("bounds", parents=[common],
                       help="covert-sensing constants over a parameter grid")
    p.add_argument("--eta", type=_float_list, required=True,
                   help="comma-separated transmissivities")
    p.add_argument("--nbar-b", type=_float_list, required=True,
                   help="comma-separated background photon numbers")

    p = sub.add_parser("budget", parents=[common, channel],
                       help="per-mode photon budget for a covertness target")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--n", type=_int_like, required=True)

    p = sub.add_parser("simulate-estimation", parents=[common, channel],
                       help="heterodyne phase estimation Monte Carlo")
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--n", type=_int_like, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--nbar-s", type=float)
    group.add_argument("--epsilon", type=float,
                       help="derive nbar-s from the covert budget")
    p.add_argument("--trials", type=_int_like, required=True)
    p.add_argument("--modulation",
                   choices=("fixed_amplitude", "gaussian_modulated"),
                   default="fixed_amplitude")

    p = sub.add_parser("simulate-adversary", parents=[common, channel],
                       help="photon-counting threshold detector Monte Carlo")
    p.add_argument("--n", type=_int_like, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--nbar-s", type=float)
    group.add_argument("--epsilon", type=float)
    p.add_argument("--gamma", type=float, default=None,
                   help="captured fraction (default: 1 - eta)")
    p.add_argument("--dark-rate", type=float, default=0.0)
    p.add_argument("--variance-convention",
                   choices=("as_printed", "bose_einstein"),
                   default="as_printed")
    p.add_argument("--p-fa-target", type=float, default=0.1)
    p.add_argument("--trials", type=_int_like, required=True)

    p = sub.add_parser("exact-pe", parents=[common, channel],
                       help="exact discrimination error of the adversary")
    p.add_argument("--n", type=_int_like, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--nbar-s", type=float)
    group.add_argument("--epsilon", type=float)
    p.add_argument("--tail-tol", type=float, default=1e-12)

    p = sub.add_parser("sweep", parents=[common, channel],
                       help="square-root-law sweep over mode counts")
    p.add_argument("--n", type=_int_list, required=True,
                   help="comma-separated ascending mode counts")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--trials", type=_int_like, required=True)
    p.add_argument("--theta", type=float, default=0.5)

    return parser


_DEFAULT_FORMAT = {
    "qfi": "json",
    "bounds": "csv",
    "budget": "json",
    "simulate-estimation": "json",
    "simulate-adversary": "json",
    "exact-pe": "json",
    "sweep": "csv",
}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    skip = {"command", "output", "format", "seed"}
    parameters = {k: v for k, v in vars(args).items() if k not in skip}
    return RunConfig(
        command=args.command,
        parameters=parameters,
        output_path=args.output,
        format=args.format or _DEFAULT_FORMAT[args.command],
        seed=args.seed,
    )


def validate(config: RunConfig) -> list[str]:
    """Human-readable diagnostics, one per violated constraint."""
    p = config.parameters
    out: list[str] = []

    def check_eta(value):
        if not 0.0 < value < 1.0:
            out.append("eta must lie strictly inside (0,1)")

    def check_nbar_b(value):
        if not value > 0.0:
            out.append(
                "nbar_b must be > 0: the covert photon budget diverges as "
                "sqrt(eta*nbar_b*(1+eta*nbar_b)) -> 0"
            )

    if config.command == "bounds":
        for eta in p["eta"]:
            check_eta(eta)
        for nb in p["nbar_b"]:
            check_nbar_b(nb)
        return out

    check_eta(p["eta"])
    check_nbar_b(p["nbar_b"])

    if "epsilon" in p and p["epsilon"] is not None:
        if not 0.0 < p["epsilon"] < 0.5:
            out.append("epsilon must lie strictly inside (0, 1/2)")
    if "nbar_s" in p and p["nbar_s"] is not None:
        if p["nbar_s"] < 0.0:
            out.append("nbar_s must be >= 0")
    if "n" in p:
        n_values = p["n"] if isinstance(p["n"], list) else [p["n"]]
        if not n_values or any(v < 1 for v in n_values):
            out.append("n must be a positive integer")
        if isinstance(p["n"], list) and sorted(n_values) != n_values:
            out.append("n list must be ascending")
    if "trials" in p and p["trials"] < 1:
        out.append("trials must be a positive integer")
    if "theta" in p and not -math.pi / 2 < p["theta"] < math.pi / 2:
        out.append("theta must lie strictly inside (-pi/2, pi/2)")
    if "p_fa_target" in p and not 0.0 < p["p_fa_target"] < 1.0:
        out.append("p-fa-target must lie strictly inside (0, 1)")
    if "gamma" in p and p["gamma"] is not None:
        if not 0.0 < p["gamma"] <= 1.0 - p["eta"]:
            out.append("gamma must lie in (0, 1-eta]")
    if "dark_rate" in p and p["dark_rate"] < 0.0:
        out.append("dark-rate must be >= 0")
    if "tail_tol" in p and not 0.0 < p["tail_tol"] <= 1e-3:
        out.append("tail-tol must lie in (0, 1e-3]")
    if "step" in p and p["step"] is not None and p["step"] <= 0.0:
        out.append("step must be > 0")
    if "nbar_s" in p and p["nbar_s"] is not None and config.command in (
        "simulate-estimation",
    ) and p["nbar_s"] <= 0.0:
        out.append("nbar_s must be > 0")
    return out


def _resolve_nbar_s(p: dict, ch: ChannelParams, n: int) -> float:
    if p.get("nbar_s") is not None:
        return p["nbar_s"]
    return covert_budget(p["epsilon"], n, ch).nbar_s


def execute(config: RunConfig) -> tuple[list[str], list[dict]] | dict:
    """Run the command; returns (columns, rows) or a scalar result dict."""
    p = config.parameters
    cmd = config.command

    if cmd == "bounds":
        rows = []
        for eta in p["eta"]:
            for nb in p["nbar_b"]:
                c = covert_constants(ChannelParams(eta, nb))
                rows.append({
                    "eta": eta, "nbar_b": nb,
                    "c_het": c.c_het, "c_coh": c.c_coh,
                    "c_sq": c.c_sq, "c_lb": c.c_lb,
                })
        return ["eta", "nbar_b", "c_het", "c_coh", "c_sq", "c_lb"], rows

    ch = ChannelParams(p["eta"], p["nbar_b"])

    if cmd == "qfi":
        kind = ProbeKind(p["probe"])
        report = build_qfi_report(kind, p["nbar_s"], ch,
                                  theta0=p["theta0"], step=p["step"])
        return {
            "probe": p["probe"],
            "nbar_s": p["nbar_s"],
            "j_closed": report.j_closed,
            "j_numeric": report.j_numeric,
            "c_q_bound": report.c_q_bound,
            "n": p["n"],
            "mse_lower_bound": (
                report.mse_lower_bound(p["n"]) if report.j_closed > 0.0 else None
            ),
        }

    if cmd == "budget":
        budget = covert_budget(p["epsilon"], p["n"], ch)
        return {
            "epsilon": budget.epsilon,
            "n": budget.n,
            "nbar_s": budget.nbar_s,
            "pe_lower_bound": detection_error_lower_bound(budget.nbar_s, budget.n, ch),
        }

    if cmd == "simulate-estimation":
        nbar_s = _resolve_nbar_s(p, ch, p["n"])
        result = simulate_estimation(EstimationConfig(
            theta_true=p["theta"],
            n=p["n"],
            nbar_s=nbar_s,
            channel=ch,
            trials=p["trials"],
            seed=config.seed,
            modulation=Modulation(p["modulation"]),
        ))
        return {
            "theta": p["theta"],
            "n": p["n"],
            "nbar_s": nbar_s,
            "modulation": p["modulation"],
            "mse": result.mse,
            "mse_stderr": result.mse_stderr,
            "sigma2_het_predicted": result.sigma2_het_predicted,
            "c_het_over_eps_sqrt_n": result.c_het_over_eps_sqrt_n,
            "trials_used": result.trials_used,
        }

    if cmd == "simulate-adversary":
        n = p["n"]
        nbar_s = _resolve_nbar_s(p, ch, n)
        adv = AdversaryModel(
            gamma=p["gamma"],
            dark_rate=p["dark_rate"],
            variance_convention=VarianceConvention(p["variance_convention"]),
        )
        moments = probe_moment_spec(ProbeKind.TMSV, nbar_s, n)
        bounds = chebyshev_detector(n, moments, adv, ch, p["p_fa_target"])
        det = simulate_detection(n, nbar_s, adv, ch, bounds.threshold_s,
                                 p["trials"], config.seed)
        return {
            "n": n,
            "nbar_s": nbar_s,
            "threshold_s": bounds.threshold_s,
            "p_fa_bound": bounds.p_fa_bound,
            "p_md_bound": bounds.p_md_bound,
            "p_e_lower": bounds.p_e_lower,
            "p_fa_hat": det.p_fa_hat,
            "p_md_hat": det.p_md_hat,
            "p_e_hat": det.p_e_hat,
            "wilson_halfwidth": det.wilson_halfwidth,
        }

    if cmd == "exact-pe":
        n = p["n"]
        nbar_s = _resolve_nbar_s(p, ch, n)
        return {
            "n": n,
            "nbar_s": nbar_s,
            "pe_exact": exact_discrimination_error(n, nbar_s, ch, p["tail_tol"]),
            "pe_bound": detection_error_lower_bound(nbar_s, n, ch),
        }

    if cmd == "sweep":
        rows = sweep_scaling(p["n"], p["epsilon"], ch, p["trials"],
                             config.seed, theta_true=p["theta"])
        columns = ["n", "nbar_s", "mse", "mse_eps_sqrtn", "c_het",
                   "pe_exact", "pe_bound", "c_coh", "c_sq", "c_lb"]
        return columns, [
            {c: getattr(row, c) for c in columns} for row in rows
        ]

    raise InvalidArgumentError(f"unknown command {cmd!r}")


def render(config: RunConfig, outcome) -> str:
    config_dict = config.to_dict()
    if isinstance(outcome, dict):
        if config.format == "json":
            return render_json(config_dict, __version__, {"result": outcome})
        return render_csv(config_dict, __version__,
                          list(outcome.keys()), [outcome])
    columns, rows = outcome
    if config.format == "json":
        return render_json(config_dict, __version__, {"rows": rows})
    return render_csv(config_dict, __version__, columns, rows)


def run(config: RunConfig) -> int:
    """Validate, execute, and write one run. Returns the exit status."""
    diagnostics = validate(config)
    if diagnostics:
        for line in diagnostics:
            print(f"covert-sense: {line}", file=sys.stderr)
        return 2
    try:
        text = render(config, execute(config))
    except (InvalidArgumentError, DomainError) as exc:
        print(f"covert-sense: {exc}", file=sys.stderr)
        return 2
    except CovertSenseError as exc:
        print(f"covert-sense: numerical failure: {exc}", file=sys.stderr)
        return 3
    try:
        if config.output_path in (None, "-"):
            sys.stdout.write(text)
        else:
            with open(config.output_path, "w", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"covert-sense: cannot write output: {exc}", file=sys.stderr)
        return 4
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
