"""Command-line front end.

Commands::

    codazzi-lab derive-table --n 8 --r 4 [--convention antisymmetric|metric]
    codazzi-lab verify-case  --case B --n 8 --r 4 [--trace]
    codazzi-lab resultant    --n 7 --r 4 [--seed 0]
    codazzi-lab certify      --grid 7..12 | --n 6 --r 3

Every command takes ``--output json|markdown``.  Exit codes: 0 when the run
verified (or reached the expected contradiction), 1 on a mismatch against a
reference form or golden file, 2 on usage errors.  When the environment variable
``CODAZZI_LAB_GOLDEN_DIR`` names a directory holding a golden file for the run,
the report is compared byte for byte against it.
"""

from __future__ import annotations

import argparse
import difflib
import json
import os
import sys
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .cases import certify_theorem, resultant_report, run_case_a, run_case_b, run_case_c, run_case_d
from .derive import compare_table
from .frame import CONVENTIONS

__all__ = ["UsageError", "RunConfig", "Report", "parse_args", "run", "main"]

SCHEMA = 1
GOLDEN_ENV = "CODAZZI_LAB_GOLDEN_DIR"


class UsageError(Exception):
    exit_code = 2


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: Optional[int] = None
    r: Optional[int] = None
    case: Optional[str] = None
    grid: Optional[Tuple[int, int]] = None
    output: str = "markdown"
    trace: bool = False
    seed: int = 0
    convention: str = "antisymmetric"


@dataclass
class Report:
    status: str  # verified, mismatch, contradiction-as-expected, error
    payload: dict
    markdown: str
    diagnostics: List[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return {"verified": 0, "contradiction-as-expected": 0, "mismatch": 1}.get(self.status, 2)

    def render(self, output: str) -> str:
        if output == "json":
            body = {"schema": SCHEMA, "status": self.status}
            body.update(self.payload)
            return json.dumps(body, indent=2, sort_keys=True) + "\n"
        return self.markdown


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="codazzi-lab", description="Exact verification of the Codazzi/Gauss case analysis.")
    p.add_argument("command", choices=["derive-table", "verify-case", "resultant", "certify"])
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--case", choices=["A", "B", "C", "D"])
    p.add_argument("--grid", help="range of n as MIN..MAX; r runs over 4..n-3")
    p.add_argument("--output", choices=["json", "markdown"], default="markdown")
    p.add_argument("--trace", action="store_true", help="include the derivation trace")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized cross-checks")
    p.add_argument("--convention", choices=sorted(CONVENTIONS), default="antisymmetric")
    return p


def _parse_grid(text: str) -> Tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            raise ValueError
        lo_i, hi_i = int(lo), int(hi)
    except ValueError:
        raise UsageError(f"--grid expects MIN..MAX, got {text!r}") from None
    if lo_i < 5:
        raise UsageError("--grid needs MIN >= 5")
    return lo_i, hi_i


def _check_nr(n: Optional[int], r: Optional[int]) -> None:
    if n is None or r is None:
        raise UsageError("--n and --r are required")
    if n < 5:
        raise UsageError(f"n must be at least 5 (got {n})")
    if not 3 <= r <= n - 2:
        raise UsageError(f"r must satisfy 3 <= r <= n-2 (got r={r}, n={n})")


def parse_args(argv: Sequence[str]) -> RunConfig:
    ns = _build_parser().parse_args(list(argv))
    grid = _parse_grid(ns.grid) if ns.grid else None
    if ns.command == "verify-case" and ns.case is None:
        raise UsageError("verify-case requires --case")
    if ns.command != "verify-case" and ns.case is not None:
        raise UsageError("--case is only valid with verify-case")
    if grid is not None and ns.command != "certify":
        raise UsageError("--grid is only valid with certify")
    if ns.command == "certify" and grid is not None:
        if ns.n is not None or ns.r is not None:
            raise UsageError("give either --grid or --n/--r")
    else:
        _check_nr(ns.n, ns.r)
    if ns.convention != "antisymmetric" and ns.command != "derive-table":
        raise UsageError("--convention is only valid with derive-table")
    return RunConfig(ns.command, ns.n, ns.r, ns.case, grid, ns.output, ns.trace, ns.seed, ns.convention)


# -- commands -----------------------------------------------------------------


def _md_escape(s: str) -> str:
    return s.replace("|", "\\|")


def _derive_table(cfg: RunConfig) -> Report:
    rows = compare_table(cfg.n, cfg.r, cfg.convention)
    diff = [row for row in rows if row.status == "DIFF"]
    status = "mismatch" if diff else "verified"
    lines = [
        f"# Codazzi table, n={cfg.n}, r={cfg.r}, convention={cfg.convention}",
        "",
        "| i | X | Y | Z | equation | status |",
        "|---|---|---|---|---|---|",
    ]
    for row in rows:
        x, y, z = row.triple
        lines.append(f"| {row.id} | {x} | {y} | {z} | {_md_escape(row.engine or row.printed)} = 0 | {row.status} |")
    for row in diff:
        lines.append("")
        lines.append(f"row {row.id}: engine `{row.engine}` vs reference `{row.printed}`")
    payload = {
        "command": "derive-table",
        "n": cfg.n,
        "r": cfg.r,
        "convention": cfg.convention,
        "rows": [
            {
                "id": row.id,
                "triple": list(row.triple),
                "status": row.status,
                "engine": row.engine,
                "reference": row.printed,
                "difference": row.difference,
            }
            for row in rows
        ],
        "counts": {s: sum(1 for row in rows if row.status == s) for s in ("MATCH", "DIFF", "VACUOUS")},
    }
    return Report(status, payload, "\n".join(lines) + "\n")


def _verify_case(cfg: RunConfig) -> Report:
    runner = {"A": run_case_a, "B": run_case_b, "C": run_case_c}
    resultant = None
    if cfg.case == "D":
        out = run_case_d(cfg.n, cfg.r, seed=cfg.seed)
        rep, resultant = out.report, out.resultant
    else:
        rep = runner[cfg.case](cfg.n, cfg.r)
    if rep.mismatches:
        status = "mismatch"
    elif rep.contradiction:
        status = "contradiction-as-expected"
    else:
        status = "mismatch"
    payload = {"command": "verify-case"}
    payload.update(rep.to_dict())
    if resultant is not None:
        payload["resultant"] = resultant.to_dict()
    if cfg.trace:
        payload["trace"] = rep.trace.steps
    lines = [
        f"# Case {rep.case}, n={rep.n}, r={rep.r}",
        "",
        "Hypotheses: " + "; ".join(rep.hypotheses),
        "",
        "| step | status | engine | note |",
        "|---|---|---|---|",
    ]
    for s in rep.steps:
        lines.append(f"| {_md_escape(s.label)} | {s.status} | {_md_escape(s.engine)} | {_md_escape(s.note)} |")
    lines.append("")
    for note in rep.notes:
        lines.append(f"- {note}")
    for k, v in sorted(rep.branches.items()):
        lines.append(f"- branch {k}: {v}")
    lines.append("")
    conclusion = rep.conclusion.removeprefix("contradiction: ") if rep.contradiction else rep.conclusion
    lines.append(f"{status}: {conclusion}")
    if cfg.trace:
        lines.append("")
        lines.append("```")
        lines.append(rep.trace.to_jsonl().rstrip("\n"))
        lines.append("```")
    return Report(status, payload, "\n".join(lines) + "\n")


def _resultant(cfg: RunConfig) -> Report:
    rr = resultant_report(cfg.n, cfg.r, seed=cfg.seed)
    ok = rr.certificate_value != 0 and all(c["agree"] for c in rr.numeric_checks)
    status = "verified" if ok else "mismatch"
    payload = {"command": "resultant"}
    payload.update(rr.to_dict())
    lines = [
        f"# Resultant in lam3, n={cfg.n}, r={cfg.r}",
        "",
        f"degree in H: {rr.degree_in_H}",
        f"leading coefficient: {payload['leading_coeff']}",
        f"certificate: leading coefficient at mu=1 is {rr.certificate_value}",
        "",
        "| H power | coefficient |",
        "|---|---|",
    ]
    for c in payload["coefficients"]:
        lines.append(f"| {c['h_power']} | {c['poly_in_mu']} |")
    lines.append("")
    for c in rr.numeric_checks:
        lines.append(f"- Sylvester check at H={c['H']}, mu={c['mu']}: {'agree' if c['agree'] else 'DISAGREE'}")
    return Report(status, payload, "\n".join(lines) + "\n")


def _certify(cfg: RunConfig) -> Report:
    if cfg.grid is not None:
        lo, hi = cfg.grid
        points = [(n, r) for n in range(lo, hi + 1) for r in range(4, n - 2)]
    else:
        points = [(cfg.n, cfg.r)]
    summary = certify_theorem(points, seed=cfg.seed)
    status = "mismatch" if summary["failures"] else "verified"
    payload = {"command": "certify"}
    payload.update(summary)
    lines = ["# Certification", "", "| n | r | A | B | C | D | deg_H res |", "|---|---|---|---|---|---|---|"]
    for p in summary["points"]:
        c = p["cases"]
        lines.append(
            f"| {p['n']} | {p['r']} | {c['A']['conclusion']} | {c['B']['conclusion']} | "
            f"{c['C']['conclusion']} | {c['D']['conclusion']} | {p.get('resultant_degree_in_H', '-')} |"
        )
    lines.append("")
    lines.append(f"{len(summary['points'])} points, {len(summary['failures'])} failures")
    for f in summary["failures"]:
        lines.append(f"- {f}")
    for p in summary["points"]:
        for note in p["notes"]:
            lines.append(f"- n={p['n']} r={p['r']}: {note}")
    return Report(status, payload, "\n".join(lines) + "\n")


COMMANDS = {"derive-table": _derive_table, "verify-case": _verify_case, "resultant": _resultant, "certify": _certify}


def golden_name(cfg: RunConfig) -> str:
    parts = [cfg.command]
    if cfg.case:
        parts.append(cfg.case)
    if cfg.grid:
        parts.append(f"grid{cfg.grid[0]}-{cfg.grid[1]}")
    else:
        parts.append(f"n{cfg.n}r{cfg.r}")
    if cfg.convention != "antisymmetric":
        parts.append(cfg.convention)
    return "_".join(parts) + (".json" if cfg.output == "json" else ".md")


def run(cfg: RunConfig) -> Report:
    report = COMMANDS[cfg.command](cfg)
    golden_dir = os.environ.get(GOLDEN_ENV)
    if golden_dir:
        path = os.path.join(golden_dir, golden_name(cfg))
        if os.path.exists(path):
            with open(path, encoding="utf-8") as fh:
                expected = fh.read()
            actual = report.render(cfg.output)
            if expected != actual:
                report.status = "mismatch"
                report.diagnostics.extend(
                    difflib.unified_diff(expected.splitlines(), actual.splitlines(), path, "actual", lineterm="")
                )
            else:
                report.diagnostics.append(f"golden file {path} matches")
    return report


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        print(f"codazzi-lab: usage error: {exc}", file=sys.stderr)
        return 2
    report = run(cfg)
    sys.stdout.write(report.render(cfg.output))
    for line in report.diagnostics:
        print(line, file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
