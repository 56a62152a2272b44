"""``gammaq`` command-line interface.

Exit codes: 0 on success, 1 for invalid input (flags, state files, names),
2 when a computation fails or a verification does not pass.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .gamma import GammaReport, gamma, normalization
from .optimize import OptimizerConfig, optimize_gamma_sup
from .povm import DEFAULT_NODES, PhaseAssignment, fourier_residual, full_targets
from .state import PureState, zoo
from .statefile import load_state, state_to_dict

POVM_TOL = 1e-9
COMMANDS = ("gamma", "profile", "sup", "verify-povm", "zoo")


class _UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gammaq", description="Relative-phase entanglement of pure multipartite states.")
    parser.add_argument("command", choices=COMMANDS)
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--zoo", metavar="NAME", help="ghz[m], w[m], cat<m>, bell, psi1, psi2, product:<dims>, random:<dims>")
    source.add_argument("--file", metavar="PATH", help="JSON state file")
    parser.add_argument("--norm", action="append", default=[], metavar="S=VALUE", help="normalization weight for subset size S (repeatable)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--restarts", type=int, default=OptimizerConfig.restarts)
    parser.add_argument("--nodes", type=int, default=DEFAULT_NODES, help="quadrature nodes per integrated phase")
    parser.add_argument("--json", action="store_true", help="emit JSON instead of text")
    parser.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    return parser


_ZOO_PATTERN = re.compile(r"^(ghz|w|cat)\(?(\d*)\)?$")


def resolve_zoo(name: str, seed: int = 0) -> PureState:
    """Turn a CLI state name such as ``ghz3`` or ``random:2,3,2`` into a state."""
    name = name.strip().lower()
    if ":" in name:
        kind, _, dims_text = name.partition(":")
        try:
            dims = [int(x) for x in dims_text.split(",")]
        except ValueError:
            raise _UsageError(f"bad dims in {name!r}") from None
        return zoo(kind, seed=seed, dims=dims)
    match = _ZOO_PATTERN.match(name)
    if match:
        kind, m = match.groups()
        return zoo(kind, m=int(m) if m else None)
    return zoo(name)


def parse_norms(items: Sequence[str], m: int) -> dict[int, float]:
    overrides = {}
    for item in items:
        size, sep, value = item.partition("=")
        try:
            overrides[int(size)] = float(value)
        except ValueError:
            raise _UsageError(f"--norm expects S=VALUE, got {item!r}") from None
        if not sep:
            raise _UsageError(f"--norm expects S=VALUE, got {item!r}")
    return normalization(m, overrides)


def _g(x: float) -> str:
    return f"{x:.6g}"


def _norms_text(norms: dict[int, float]) -> str:
    values = set(norms.values())
    if len(values) == 1:
        return f"all {_g(values.pop())}"
    return ", ".join(f"{s}={_g(v)}" for s, v in sorted(norms.items()))


def _subset_text(subset) -> str:
    return "{" + ",".join(str(u) for u in subset) + "}"


def _gamma_text(report: GammaReport) -> list[str]:
    return [f"gamma = {report.gamma!r} (norms: {_norms_text(report.norms)})"]


def _profile_text(report: GammaReport) -> list[str]:
    lines = [f"{'subset':<16}{'value':>14}{'N_s':>8}{'weighted':>14}"]
    for subset, value in report.contributions.items():
        weight = report.norms[len(subset)]
        lines.append(f"{_subset_text(subset):<16}{_g(value):>14}{_g(weight):>8}{_g(weight * value):>14}")
    lines.append("term counts: " + ", ".join(f"{s}={n}" for s, n in sorted(report.term_counts.items())))
    return lines + _gamma_text(report)


def _verify_povm(state: PureState, seed: int, nodes: int) -> dict:
    rng = np.random.default_rng(seed)
    first = PhaseAssignment.random(state.dims, rng)
    second = PhaseAssignment.random(state.dims, rng)
    worst, spread = 0.0, 0.0
    targets = full_targets(state.dims)
    for target in targets:
        a = fourier_residual(state, target, nodes, first)
        b = fourier_residual(state, target, nodes, second)
        worst = max(worst, a, b)
        spread = max(spread, abs(a - b))
    return {
        "max_residual": worst,
        "max_fixed_phase_change": spread,
        "targets": len(targets),
        "nodes": nodes,
        "tolerance": POVM_TOL,
        "pass": bool(worst < POVM_TOL and spread < POVM_TOL),
    }


def _dispatch(args) -> tuple[object, list[str], int]:
    state = load_state(args.file) if args.file else resolve_zoo(args.zoo, args.seed)
    if args.command == "zoo":
        doc = state_to_dict(state)
        return doc, [json.dumps(doc)], 0
    if args.command == "verify-povm":
        result = _verify_povm(state, args.seed, args.nodes)
        verdict = "PASS" if result["pass"] else "FAIL"
        line = f"max |γ − 2π|ρ|| = {result['max_residual']:.3g}; {verdict}"
        return result, [line], 0 if result["pass"] else 2

    norms = parse_norms(args.norm, state.num_parties)
    if args.command == "gamma":
        report = gamma(state, norms)
        return report.to_json(), _gamma_text(report), 0
    if args.command == "profile":
        report = gamma(state, norms)
        return report.to_json(), _profile_text(report), 0

    if args.restarts < 1:
        raise _UsageError("--restarts must be >= 1")
    result = optimize_gamma_sup(state, norms, OptimizerConfig(restarts=args.restarts, seed=args.seed))
    doc = {**result.to_json(), "report": result.report.to_json()}
    lines = _gamma_text(gamma(state, norms)) + [
        f"gamma_sup_lower_bound = {result.best_gamma!r}",
        f"restarts = {result.restarts}, evaluations = {result.evaluations}",
    ]
    return doc, lines, 0


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        doc, lines, code = _dispatch(args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except ValidationError as exc:
        print(f"gammaq: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"gammaq: computation failed: {exc}", file=sys.stderr)
        return 2

    text = json.dumps(doc, indent=2) if args.json else "\n".join(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
