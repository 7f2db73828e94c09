"""Command-line front end.

Usage::

    qutrit-teleport verify [--channel {u,nu}]
    qutrit-teleport audit  [--channel {u,nu}]
    qutrit-teleport run    --channel nu --mode kraus --trials 90000 --seed 7 --state 1,0,0
    qutrit-teleport table
    qutrit-teleport dump   {basis,channels,operators} [--channel nu] [--provenance synthesized]

Every command takes ``--format {text,json,csv}`` and ``--out PATH``.
Exit status: 0 success, 1 failed verification, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import reports
from .errors import TeleportError
from .protocol import HAAR, CorrectionMode, run_monte_carlo
from .states import ChannelKind, Provenance, unknown_qutrit

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

STATE_TOL = 1e-2

MODE_ALIASES = {
    "unitary-paper": CorrectionMode.UNITARY_PAPER,
    "rescale": CorrectionMode.SYNTHESIZED_RESCALE,
    "kraus": CorrectionMode.KRAUS_PROBABILISTIC,
}
PROVENANCE_ALIASES = {"paper": Provenance.PAPER, "synthesized": Provenance.SYNTHESIZED}


def parse_complex(text: str) -> complex:
    """Parse ``re[+imi]`` (e.g. ``0.6``, ``0.8i``, ``-0.1+0.2i``)."""
    t = text.strip().replace(" ", "")
    if not t or "j" in t.lower():
        raise ValueError(f"not a complex number: {text!r}")
    return complex(t.replace("i", "j").replace("I", "j"))


def parse_state(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError("--state needs three comma-separated amplitudes")
    amps = [parse_complex(p) for p in parts]
    norm = float(np.linalg.norm(amps))
    if norm == 0.0:
        raise ValueError("--state must not be the zero vector")
    if abs(norm - 1.0) > STATE_TOL:
        raise ValueError(f"--state has norm {norm:.6g}; expected 1 within {STATE_TOL}")
    return unknown_qutrit(*amps, normalize=True)


def _use_color(stream) -> bool:
    return "NO_COLOR" not in os.environ and hasattr(stream, "isatty") and stream.isatty()


def _flag(ok: bool, color: bool) -> str:
    word = "PASS" if ok else "FAIL"
    if not color:
        return word
    return f"\033[32m{word}\033[0m" if ok else f"\033[31m{word}\033[0m"


def _fmt_c(pair) -> str:
    re, im = pair
    return f"{re:+.17g}{im:+.17g}i"


def text_verify(r: dict, color: bool) -> str:
    lines = [f"{_flag(c['passed'], color)}  {c['name']:<32} residual={c['residual']:.3e}  tol={c['tolerance']:.0e}" for c in r["checks"]]
    lines.append(f"{r['n_checks'] - r['n_failed']}/{r['n_checks']} checks passed")
    if r["failures"]:
        lines.append("failed: " + ", ".join(r["failures"]))
    return "\n".join(lines) + "\n"


def text_audit(r: dict, color: bool) -> str:
    lines = [f"probe set {r['probe_set']['version']} ({r['probe_set']['count']} states), tolerance {r['tolerance']:g}"]
    for ch in r["channels"]:
        pf = ch["prefactor"]
        lines.append("")
        lines.append(f"channel {ch['channel']}")
        lines.append(
            f"  prefactor: projected={pf['projected']:.12g} printed expansion={pf['printed_decomposition']:.12g} "
            f"printed retrieval={pf['printed_retrieval']:.12g}"
        )
        lines.append("  k  exact  proportional  residual     vs-printed-state  synthesized  state-match")
        for a, b, s, d in zip(ch["printed_vs_projected"], ch["printed_vs_printed"], ch["synthesized"], ch["state_diffs"]):
            lines.append(
                f"  {a['outcome']}  {_flag(a['holds_exactly'], color)}   {_flag(a['holds_proportionally'], color)}"
                f"          {a['residual']:.3e}    {_flag(b['holds_proportionally'], color)}"
                f"              {_flag(s['holds_proportionally'], color)}         {_flag(d['matches'], color)}"
            )
    return "\n".join(lines) + "\n"


def text_table(r: dict, color: bool) -> str:
    lines = [f"{'channel':<8}{'EoE (bits)':>14}{'ref':>8}{'negativity':>14}{'TP':>12}{'ref':>6}  checks"]
    for row in r["rows"]:
        ok = row["entropy_pass"] and row["closed_form_pass"] and row["fidelity_pass"]
        lines.append(
            f"{row['kind']:<8}{row['entropy_bits']:>14.5f}{row['paper_entropy']:>8.3f}{row['negativity']:>14.5f}"
            f"{row['fidelity_from_negativity']:>12.5f}{row['paper_fidelity']:>6.1f}  {_flag(ok, color)}"
        )
        if row["note"]:
            lines.append(f"  note: {row['note']}")
    lines.append(f"TP is the {r['rows'][0]['fidelity_label']} (1 + N) / 2")
    return "\n".join(lines) + "\n"


def text_run(r: dict, color: bool) -> str:
    lines = [
        f"channel: {r['channel']}",
        f"mode: {r['mode']}",
        f"trials: {r['trials']}",
        f"seed: {r['seed']}",
        "state: " + (r["state"] if r["state"] == HAAR else ", ".join(_fmt_c(p) for p in r["state"])),
        "frequencies: " + " ".join(repr(x) for x in r["frequencies"]),
    ]
    if r["closed_form"] is not None:
        lines.append("closed_form: " + " ".join(repr(x) for x in r["closed_form"]))
    lines.append(f"mean_fidelity: {r['mean_fidelity']!r}")
    if r["post_selected_fidelity"] is not None:
        lines.append(f"post_selected_fidelity: {r['post_selected_fidelity']!r}")
    lines.append(f"success_rate: {r['success_rate']!r}")
    if r["closed_form_success_rate"] is not None:
        lines.append(f"closed_form_success_rate: {r['closed_form_success_rate']!r}")
    return "\n".join(lines) + "\n"


def text_dump(r: dict, color: bool) -> str:
    lines = []
    for item in r["items"]:
        lines.append(item["label"])
        if "amplitudes" in item:
            lines.extend(f"  [{i}] {_fmt_c(p)}" for i, p in enumerate(item["amplitudes"]))
        else:
            lines.extend("  " + "  ".join(_fmt_c(p) for p in row) for row in item["matrix"])
    return "\n".join(lines) + "\n"


TEXT_RENDERERS = {
    "verify": text_verify,
    "audit": text_audit,
    "table": text_table,
    "run": text_run,
    "dump": text_dump,
}


def render(report: dict, fmt: str, color: bool = False) -> str:
    if fmt == "json":
        return reports.to_json(report)
    if fmt == "csv":
        return reports.to_csv(report)
    return TEXT_RENDERERS[report["report"]](report, color)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="qutrit-teleport", description="Single-qutrit teleportation simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="run the identity verification suite")
    p.add_argument("--channel", choices=("u", "nu"))
    p.add_argument("--corrupt-outcome", type=int, choices=range(9), help=argparse.SUPPRESS)

    p = sub.add_parser("audit", parents=[common], help="audit printed operators and states")
    p.add_argument("--channel", choices=("u", "nu"))

    p = sub.add_parser("run", parents=[common], help="Monte Carlo teleportation run")
    p.add_argument("--channel", choices=("u", "nu"), default="u")
    p.add_argument("--mode", choices=tuple(MODE_ALIASES), help="default: unitary-paper for u, rescale for nu")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--state", help="comma-separated amplitudes a,b,c in re[+imi] form")
    group.add_argument("--random", action="store_true", help="fresh Haar-random state per trial (default)")

    sub.add_parser("table", parents=[common], help="entropy / negativity / fidelity table")

    p = sub.add_parser("dump", parents=[common], help="print named states or operators")
    p.add_argument("what", choices=reports.DUMP_TARGETS)
    p.add_argument("--channel", choices=("u", "nu"), default="u")
    p.add_argument("--provenance", choices=tuple(PROVENANCE_ALIASES), default="paper")
    return parser


def _channels(arg: str | None) -> tuple[ChannelKind, ...]:
    return tuple(ChannelKind) if arg is None else (ChannelKind(arg),)


def execute(args: argparse.Namespace, parser: argparse.ArgumentParser) -> tuple[dict, int]:
    if args.command == "verify":
        r = reports.verify_report(_channels(args.channel), args.corrupt_outcome)
        return r, EXIT_OK if r["passed"] else EXIT_FAILED
    if args.command == "audit":
        return reports.audit_report(_channels(args.channel)), EXIT_OK
    if args.command == "table":
        r = reports.table_report()
        return r, EXIT_OK if r["passed"] else EXIT_FAILED
    if args.command == "dump":
        return reports.dump_report(args.what, ChannelKind(args.channel), PROVENANCE_ALIASES[args.provenance]), EXIT_OK

    kind = ChannelKind(args.channel)
    if args.mode is None:
        mode = CorrectionMode.UNITARY_PAPER if kind is ChannelKind.U else CorrectionMode.SYNTHESIZED_RESCALE
    else:
        mode = MODE_ALIASES[args.mode]
    if mode is CorrectionMode.UNITARY_PAPER and kind is not ChannelKind.U:
        parser.error("--mode unitary-paper requires --channel u")
    if args.trials < 1:
        parser.error("--trials must be at least 1")
    if not 0 <= args.seed < 2**64:
        parser.error("--seed must be an unsigned 64-bit integer")
    if args.workers < 1:
        parser.error("--workers must be at least 1")
    if args.state is not None:
        try:
            phi = parse_state(args.state)
        except (ValueError, TeleportError) as exc:
            parser.error(str(exc))
    else:
        phi = HAAR
    report = run_monte_carlo(phi, kind, mode, args.trials, args.seed, workers=args.workers)
    return reports.run_report_to_dict(report), EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    report, status = execute(args, parser)
    if args.out:
        text = render(report, args.format, color=False)
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(render(report, args.format, color=_use_color(sys.stdout)))
    return status


if __name__ == "__main__":
    sys.exit(main())
