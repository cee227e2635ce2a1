"""Command-line entry point.

Exit codes: 0 success (verdict true), 1 verdict false or no perfect LOCC
setting, 2 invalid input. The default seed comes from ``--seed``, then the
``MMES_LAB_SEED`` environment variable, then 0.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .channels import XxzParams, block_swap_channel, evolution_report, xxz_ground_state
from .locc import NoPerfectSettingError, discriminate, sample_run
from .measures import fully_entangled_fraction, optimal_teleport_fidelity
from .mmes import is_mmes, two_block_mixture
from .qmat import PureState, maximally_entangled, random_pure_state
from .statefile import read_state
from .suite import run_suite
from .teleport import simulate_mmes_teleport
from .validation import InvalidStateError

EXIT_OK, EXIT_FALSE, EXIT_INVALID = 0, 1, 2
SEED_ENV = "MMES_LAB_SEED"


class UsageError(ValueError):
    pass


@dataclass
class RunReport:
    command: str
    parameters: dict
    seed: int
    verdicts: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v["passed"] for v in self.verdicts)

    def add(self, name: str, passed: bool, witness: float) -> None:
        self.verdicts.append({"name": name, "passed": bool(passed), "witness": float(witness)})

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "parameters": self.parameters,
            "seed": self.seed,
            "verdicts": self.verdicts,
            "data": self.data,
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"{self.command} (seed {self.seed})"]
        for v in self.verdicts:
            mark = "PASS" if v["passed"] else "FAIL"
            lines.append(f"  [{mark}] {v['name']}  witness={v['witness']:.3e}")
        for key, value in self.data.items():
            lines.append(f"  {key}: {json.dumps(value, sort_keys=True)}")
        return "\n".join(lines)


def _seed(value) -> int:
    if value is None:
        value = os.environ.get(SEED_ENV, "0")
    try:
        seed = int(value)
    except ValueError:
        raise UsageError(f"seed must be an integer, got {value!r}")
    if not 0 <= seed < 2**64:
        raise UsageError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def _load(path, kind):
    state = read_state(path)
    if kind == "density" and isinstance(state, PureState):
        state = state.density()
    if kind == "pure" and not isinstance(state, PureState):
        raise UsageError(f"{path}: expected a pure state")
    return state


def _cmd_verify(args) -> RunReport:
    ds = [int(x) for x in args.d.split(",") if x.strip()]
    coef = 0.5 if args.kraus == "literal" else 1 / math.sqrt(2)
    report = RunReport("verify", {"d": ds, "tol": args.tol, "kraus": args.kraus}, args.seed)
    for v in run_suite(ds, args.tol, args.seed, coef):
        report.add(v.name, v.passed, v.witness)
    return report


def _cmd_mmes_check(args) -> RunReport:
    rho = _load(args.input, "density")
    cert = is_mmes(rho, args.small_side, args.tol)
    report = RunReport("mmes-check", {"input": str(args.input), "small_side": cert.small_side, "tol": args.tol},
                       args.seed)
    report.add("is_mmes", cert.verdict,
               max(cert.worst_schmidt_deviation, cert.worst_cross_trace_norm, cert.reduced_small_side_deviation))
    report.data["certificate"] = cert.to_dict()
    return report


def _cmd_teleport(args) -> RunReport:
    if args.state:
        psi = _load(args.state, "pure")
        psi = PureState(psi.amplitudes, (psi.amplitudes.shape[0], 1))
        if psi.dims.dA != args.d:
            raise InvalidStateError("shape", f"state has dimension {psi.dims.dA}, --d is {args.d}")
    else:
        psi = random_pure_state((args.d, 1), np.random.default_rng(args.seed))
    outcomes = simulate_mmes_teleport(psi)
    report = RunReport("teleport", {"d": args.d, "state": args.state or "random"}, args.seed)
    report.add("corrected_fidelity", all(o.fidelity_after_correction >= 1 - 1e-9 for o in outcomes),
               max(1 - o.fidelity_after_correction for o in outcomes))
    prob_dev = max(abs(o.probability - 1 / (2 * args.d**2)) for o in outcomes)
    report.add("uniform_probabilities", prob_dev <= 1e-10, prob_dev)
    report.data["outcomes"] = [o.to_dict() for o in outcomes]
    return report


def _cmd_channel_demo(args) -> RunReport:
    if not 0 <= args.p <= 1:
        raise UsageError("--p must lie in [0, 1]")
    ch = block_swap_channel()
    report = RunReport("channel-demo", {"p": args.p}, args.seed)
    mix = evolution_report(ch, two_block_mixture(args.p), "B", "A", rng=args.seed)
    report.add("mixture:mmes_after", mix.mmes_after.verdict, mix.mmes_after.worst_schmidt_deviation)
    report.add("mixture:negativity_kept", abs(mix.negativity_after - mix.negativity_before) <= 1e-8,
               abs(mix.negativity_after - mix.negativity_before))
    pure = evolution_report(ch, maximally_entangled(4).density(), "B", "A", rng=args.seed)
    report.add("max_entangled_4x4:negativity_drop", pure.negativity_before - pure.negativity_after >= 0.1,
               pure.negativity_before - pure.negativity_after)
    report.data["mixture"] = mix.to_dict()
    report.data["max_entangled_4x4"] = pure.to_dict()
    return report


def _parse_subset(text: str):
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise UsageError(f"bad subset entry {chunk!r}; expected 's,t'")
        try:
            out.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise UsageError(f"bad subset entry {chunk!r}; expected integers")
    if not out:
        raise UsageError("empty subset")
    return out


def _cmd_locc(args) -> RunReport:
    subset = _parse_subset(args.subset)
    report = RunReport("locc", {"d": args.d, "subset": [list(c) for c in subset], "trials": args.trials}, args.seed)
    try:
        proto = discriminate(subset, args.d)
    except NoPerfectSettingError as exc:
        label, overlap = exc.witness
        report.add("perfect_setting", False, overlap)
        report.data["best_setting"] = label
        return report
    rng = np.random.default_rng(args.seed)
    report.add("perfect_setting", True, 0.0)
    report.data["setting"] = proto.setting.label
    rates = {}
    for c in proto.candidates:
        rate = sample_run(proto, c, args.trials, rng)
        rates[f"{c.s},{c.t}"] = rate
        report.add(f"sample_run:{c.s},{c.t}", rate == 1.0, 1.0 - rate)
    report.data["success_rates"] = rates
    return report


def _cmd_fef(args) -> RunReport:
    rho = _load(args.input, "density")
    res = fully_entangled_fraction(rho, args.restarts, args.max_iter, args.tol, np.random.default_rng(args.seed))
    d = rho.dims.dA
    report = RunReport("fef", {"input": str(args.input), "restarts": args.restarts, "max_iter": args.max_iter,
                               "tol": args.tol}, args.seed)
    report.add("converged", res.converged, res.value)
    report.data["value"] = res.value
    report.data["optimal_teleport_fidelity"] = optimal_teleport_fidelity(min(max(res.value, 0.0), 1.0), d)
    report.data["optimizer"] = [[[float(z.real), float(z.imag)] for z in row] for row in res.optimizer]
    report.data["restarts_used"] = res.restarts_used
    return report


def _cmd_xxz(args) -> RunReport:
    params = XxzParams(args.j, args.delta)
    gs = xxz_ground_state(params)
    report = RunReport("xxz", {"J": args.j, "Delta": args.delta}, args.seed)
    report.data["antiferromagnetic_regime"] = params.antiferromagnetic_regime
    report.data["ground_state"] = gs.to_dict()
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmes-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--json", action="store_true", help="print a machine-readable report")
        if seed:
            p.add_argument("--seed", default=None, help=f"RNG seed (default: ${SEED_ENV} or 0)")
        return p

    p = common(sub.add_parser("verify", help="run the invariant suite"))
    p.add_argument("--d", default="2,3,5")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--kraus", choices=["corrected", "literal"], default="corrected",
                   help="Kraus coefficient 1/sqrt(2) (corrected) or 1/2 (literal)")
    p.set_defaults(func=_cmd_verify)

    p = common(sub.add_parser("mmes-check", help="certify a state file"))
    p.add_argument("--input", required=True)
    p.add_argument("--small-side", type=str.upper, choices=["A", "B"], default="A")
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=_cmd_mmes_check)

    p = common(sub.add_parser("teleport", help="teleport with the rank-2 resource"))
    p.add_argument("--d", type=int, required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--state")
    src.add_argument("--random", action="store_true")
    p.set_defaults(func=_cmd_teleport)

    p = common(sub.add_parser("channel-demo", help="block-swap channel on two reference states"))
    p.add_argument("--p", type=float, default=0.3)
    p.set_defaults(func=_cmd_channel_demo)

    p = common(sub.add_parser("locc", help="discriminate a set of chi_st states"))
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--subset", required=True, help='e.g. "0,0;1,0"')
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=_cmd_locc)

    p = common(sub.add_parser("fef", help="fully entangled fraction of a state file"))
    p.add_argument("--input", required=True)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=_cmd_fef)

    p = common(sub.add_parser("xxz", help="ground state of the spin-1/2 x spin-3/2 XXZ pair"))
    p.add_argument("--j", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.set_defaults(func=_cmd_xxz)
    return parser


def dispatch(argv=None) -> tuple[int, RunReport | None]:
    """Run one subcommand; returns ``(exit_code, report)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_INVALID if exc.code else EXIT_OK), None
    try:
        args.seed = _seed(getattr(args, "seed", None))
        report = args.func(args)
    except (ValueError, OSError) as exc:
        # StateFileError, InvalidStateError, UsageError, NonPrimeDimensionError
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID, None
    print(report.to_json() if args.json else report.to_text())
    return (EXIT_OK if report.passed else EXIT_FALSE), report


def main(argv=None) -> int:
    code, _ = dispatch(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
