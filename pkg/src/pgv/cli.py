"""Command-line front end: ``pgv {build,analyze,verify,oracle,fixtures}``.

Every report is a plain dict (schema ``pgv-report/1``) rendered either as JSON
or as markdown from the same data.  Group orders appear as ``[p, k]`` pairs.
Wall-clock timings go to stderr so repeated runs give identical reports.

Exit codes: 0 every check passed, 1 usage or input error, 2 a check failed or a
non-central automorphism was found, 3 inconclusive within the budget.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import criteria, homs, solver, structure, symbolic
from .families import FAMILIES, FamilySpec
from .presentation import PcPresentation, PresentationError, format_presentation, parse_presentation, validate_consistency
from .structure import Relation, compare_subgroups

SCHEMA = "pgv-report/1"
EXIT_OK, EXIT_USAGE, EXIT_FAILED, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


@dataclass
class Report:
    command: str
    source: dict
    data: dict = field(default_factory=dict)
    checks: list[dict] = field(default_factory=list)
    inconclusive: bool = False
    timings: dict[str, float] = field(default_factory=dict)

    def check(self, name: str, passed: bool, by: str) -> bool:
        self.checks.append({"name": name, "passed": bool(passed), "check": by})
        return passed

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def exit_code(self) -> int:
        if not self.passed:
            return EXIT_FAILED
        return EXIT_INCONCLUSIVE if self.inconclusive else EXIT_OK

    def as_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "command": self.command,
            "source": self.source,
            **self.data,
            "checks": self.checks,
            "passed": self.passed,
            "exit_code": self.exit_code(),
        }


# ---------------------------------------------------------------------------
# rendering


def to_json(report: Report) -> str:
    return json.dumps(report.as_dict(), indent=2, sort_keys=False) + "\n"


def _md_value(v) -> str:
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, int) for x in v) and v[0] > 1:
        return f"{v[0]}^{v[1]}"
    if isinstance(v, (dict, list)):
        return json.dumps(v)
    return str(v)


def to_markdown(report: Report) -> str:
    d = report.as_dict()
    out = [f"# pgv {d['command']}", ""]
    out.append("source: " + ", ".join(f"{k}={_md_value(v)}" for k, v in d["source"].items()))
    for section, body in d.items():
        if section in ("schema", "command", "source", "checks", "passed", "exit_code"):
            continue
        out += ["", f"## {section}"]
        if isinstance(body, dict):
            out += [f"- {k}: {_md_value(v)}" for k, v in body.items()]
        else:
            out.append(_md_value(body))
    if d["checks"]:
        out += ["", "## checks"]
        for c in d["checks"]:
            out.append(f"- [{'PASS' if c['passed'] else 'FAIL'}] {c['name']}  ({c['check']})")
    out += ["", f"passed: {d['passed']}", f"exit_code: {d['exit_code']}", f"schema: {d['schema']}"]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# inputs


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise UsageError(f"{name}={raw!r} is not an integer") from exc


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise UsageError(f"{name}={raw!r} is not a number") from exc


def _load(args) -> tuple[PcPresentation, FamilySpec | None, dict]:
    if args.file and args.family:
        raise UsageError("give either --family or --file, not both")
    if args.file:
        path = Path(args.file)
        try:
            text = path.read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
        try:
            P = parse_presentation(text)
        except PresentationError as exc:
            raise UsageError(f"{path}: {exc}") from exc
        return P, None, {"file": path.name, "p": P.p}
    if not args.family:
        raise UsageError("one of --family or --file is required")
    if args.p is None:
        raise UsageError("-p is required with --family")
    if args.family == "A" and args.n is None:
        raise UsageError("family A needs -n")
    n = args.n if args.family == "A" else None
    spec = FamilySpec(args.family, args.p, n)
    try:
        P = spec.build()
    except PresentationError as exc:
        raise UsageError(str(exc)) from exc
    source = {"family": args.family, "p": args.p}
    if n is not None:
        source["n"] = n
    return P, spec, source


def _budget(args) -> solver.Budget:
    nodes = args.budget_nodes if args.budget_nodes is not None else _env_int("PGV_BUDGET_NODES", solver.DEFAULT_NODE_BUDGET)
    seconds = args.budget_seconds if args.budget_seconds is not None else _env_float("PGV_BUDGET_SECONDS", solver.DEFAULT_SECONDS)
    if nodes <= 0 or seconds <= 0:
        raise UsageError("budgets must be positive")
    return solver.Budget(nodes, seconds)


def _seed(args) -> int:
    return args.seed if args.seed is not None else _env_int("PGV_SEED", 0)


# ---------------------------------------------------------------------------
# report sections


def _pk(p: int, k: int) -> list[int]:
    return [p, k]


def _logp(P: PcPresentation, x: int) -> int:
    return structure._logp(x, P.p)


def presentation_section(P: PcPresentation) -> dict:
    return {
        "p": P.p,
        "generators": P.d,
        "relative_orders": [_pk(P.p, e) for e in P.orders],
        "order": _pk(P.p, P.log_order),
        "abelian": P.is_abelian,
    }


def structure_section(P: PcPresentation) -> dict:
    Z, gamma, phi = structure.center(P), structure.derived_subgroup(P), structure.frattini(P)
    exp = structure.exponent(P)
    return {
        "center": str(Z.type),
        "center_order": _pk(P.p, Z.log_order),
        "derived": str(gamma.type),
        "derived_order": _pk(P.p, gamma.log_order),
        "frattini_order": _pk(P.p, phi.log_order),
        "frattini_rank": structure.frattini_rank(P),
        "abelianisation": str(structure.section_type(P, "G/γ2")),
        "exponent": _pk(P.p, _logp(P, exp)),
        "derived_vs_center": compare_subgroups(gamma, Z).value,
        "center_vs_frattini": compare_subgroups(Z, phi).value,
        "derived_vs_frattini": compare_subgroups(gamma, phi).value,
        "purely_nonabelian": structure.is_purely_nonabelian(P),
    }


def criteria_section(P: PcPresentation) -> dict:
    out: dict = {}
    pure = structure.is_purely_nonabelian(P)
    guard = criteria.earnley_guard(P)
    out["earnley_guard_applicable"] = guard.applicable
    if not pure or P.is_abelian:
        out["autcent_order"] = None
        return out
    out["autcent_order"] = _pk(P.p, homs.autcent_order(P))
    if P.p % 2:
        ay = criteria.adney_yen(P)
        out["adney_yen"] = {
            "a": ay.a,
            "b": ay.b,
            "c": ay.c,
            "d": ay.d,
            "r_equals_k": ay.r_equals_k,
            "cyclic_condition": ay.cyclic_condition,
            "abelian": ay.abelian,
            "cyclic_witness": list(ay.cyclic_witness) if ay.cyclic_witness else None,
        }
        out["autcent_elementary_abelian"] = criteria.jafari_odd(P)
        dich = criteria.dichotomy(P)
        out["dichotomy"] = {"branch1": dich.branch1, "branch2": dich.branch2, "exponent": _pk(P.p, _logp(P, dich.exponent))}
    else:
        jt = criteria.jafari_two(P)
        out["autcent_elementary_abelian"] = bool(jt.satisfied)
        out["jafari_two_conditions"] = list(jt.satisfied)
    return out


def solver_section(verdict: solver.Verdict) -> dict:
    st = verdict.stats
    out = {
        "verdict": verdict.kind.value,
        "level0_patterns": verdict.patterns,
        "nodes": st.nodes,
        "level0_nodes": st.level0_nodes,
        "prune_equation": st.prune_equation,
        "prune_invertible": st.prune_invertible,
        "prune_central": st.prune_central,
        "linear_solves": st.linear_solves,
    }
    if verdict.witness is not None:
        out["witness"] = list(verdict.witness)
        out["witness_images"] = [list(x) for x in verdict.witness_images]
    if verdict.reason:
        out["reason"] = verdict.reason
    return out


# ---------------------------------------------------------------------------
# family claims


def _structural_claims(report: Report, P: PcPresentation, spec: FamilySpec, s: dict, c: dict) -> None:
    p = P.p
    fam = spec.family
    if fam == "A":
        n = spec.n
        report.check(f"order is p^{n + 10}", P.log_order == n + 10, "presentation.log_order")
        report.check(f"exponent is p^{n}", s["exponent"] == [p, n], "structure.exponent")
        if n == 4:
            report.check("derived subgroup equals center", s["derived_vs_center"] == Relation.EQUAL.value, "structure.compare_subgroups")
        else:
            report.check("derived subgroup < center", s["derived_vs_center"] == Relation.LESS.value, "structure.compare_subgroups")
        report.check("center < Frattini", s["center_vs_frattini"] == Relation.LESS.value, "structure.compare_subgroups")
        if p % 2:
            report.check("Autcent abelian", c["adney_yen"]["abelian"], "criteria.adney_yen")
            if n >= 5:
                report.check("cyclic condition witnessed", c["adney_yen"]["cyclic_condition"], "criteria.adney_yen")
            report.check("Autcent not elementary abelian", not c["autcent_elementary_abelian"], "criteria.jafari_odd")
    elif fam == "B":
        report.check("order is p^9", P.log_order == 9, "presentation.log_order")
        report.check("Frattini < center", s["center_vs_frattini"] == Relation.GREATER.value, "structure.compare_subgroups")
        report.check(
            "derived subgroup equals Frattini, elementary abelian",
            s["derived_vs_frattini"] == Relation.EQUAL.value and structure.derived_subgroup(P).type.is_elementary,
            "structure.compare_subgroups",
        )
        report.check("center has exponent p^2", structure.center(P).type.log_exponent == 2, "structure.center")
        if p % 2:
            report.check("Autcent elementary abelian", c["autcent_elementary_abelian"], "criteria.jafari_odd")
            d = c["dichotomy"]
            report.check("dichotomy: second branch only", d["branch2"] and not d["branch1"], "criteria.dichotomy")
            report.check("exponent is p^2", d["exponent"] == [p, 2], "criteria.dichotomy")
        else:
            report.check("p = 2 criterion: first condition only", c["jafari_two_conditions"] == [1], "criteria.jafari_two")
    elif fam == "C":
        report.check("order is p^8", P.log_order == 8, "presentation.log_order")
        report.check("derived subgroup < Frattini", s["derived_vs_frattini"] == Relation.LESS.value, "structure.compare_subgroups")
        report.check(
            "center equals Frattini, elementary abelian",
            s["center_vs_frattini"] == Relation.EQUAL.value and structure.center(P).type.is_elementary,
            "structure.compare_subgroups",
        )
        if p % 2:
            report.check("Autcent elementary abelian", c["autcent_elementary_abelian"], "criteria.jafari_odd")
            d = c["dichotomy"]
            report.check("dichotomy: first branch only", d["branch1"] and not d["branch2"], "criteria.dichotomy")
            report.check("exponent is p^2", d["exponent"] == [p, 2], "criteria.dichotomy")
        else:
            report.check("p = 2 criterion: second condition only", c["jafari_two_conditions"] == [2], "criteria.jafari_two")
    elif fam == "heisenberg" and p % 2:
        report.check("non-abelian of exponent p", c["earnley_guard_applicable"], "criteria.earnley_guard")


_AUT_LOG = {"B": 20, "C": 16}


def _expected_aut_log(spec: FamilySpec | None) -> int | None:
    if spec is None:
        return None
    if spec.family == "A":
        return spec.n + 20
    return _AUT_LOG.get(spec.family)


# ---------------------------------------------------------------------------
# commands


def cmd_build(args) -> tuple[Report, str | None]:
    P, spec, source = _load(args)
    if spec is None:
        raise UsageError("build needs --family")
    report = Report("build", source)
    cons = validate_consistency(P)
    report.data["presentation"] = presentation_section(P)
    report.check("presentation is consistent", cons.ok, "presentation.validate_consistency")
    text = format_presentation(P, header=f"family {spec.label}")
    if args.json:
        report.data["presentation_file"] = text
    return report, text


def _analyze(args, command: str) -> tuple[Report, PcPresentation, FamilySpec | None]:
    P, spec, source = _load(args)
    report = Report(command, source)
    t = time.monotonic()
    cons = validate_consistency(P)
    report.data["presentation"] = presentation_section(P)
    report.check("presentation is consistent", cons.ok, "presentation.validate_consistency")
    if not cons.ok:
        return report, P, spec
    s = structure_section(P)
    report.data["structure"] = s
    c = criteria_section(P)
    report.data["criteria"] = c
    report.timings["analyze"] = time.monotonic() - t
    if spec is not None:
        _structural_claims(report, P, spec, s, c)
    return report, P, spec


def cmd_analyze(args) -> tuple[Report, None]:
    report, _, _ = _analyze(args, "analyze")
    return report, None


def cmd_verify(args) -> tuple[Report, None]:
    report, P, spec = _analyze(args, "verify")
    if not report.passed:
        return report, None
    t = time.monotonic()
    verdict = solver.verify_all_central(P, _budget(args), workers=args.workers, ordering=args.ordering)
    report.timings["solver"] = time.monotonic() - t
    report.data["solver"] = solver_section(verdict)
    c = report.data["criteria"]
    aut: dict = {"order": None, "abelian": None, "elementary_abelian": None}
    if verdict.kind is solver.VerdictKind.INCONCLUSIVE:
        report.inconclusive = True
    elif verdict.kind is solver.VerdictKind.COUNTEREXAMPLE:
        report.check("every automorphism is central", False, "solver.verify_all_central")
    else:
        report.check("every automorphism is central", True, "solver.verify_all_central")
        if c.get("autcent_order") is not None:
            aut["order"] = c["autcent_order"]
            # Aut = Autcent here, so abelian-ness is read off the criteria module
            # (for p = 2 only the elementary abelian criterion is available)
            ay = c.get("adney_yen")
            if ay:
                aut["abelian"] = bool(ay["abelian"])
            elif c["autcent_elementary_abelian"]:
                aut["abelian"] = True
            aut["elementary_abelian"] = bool(c["autcent_elementary_abelian"])
            if aut["abelian"] and c["earnley_guard_applicable"]:
                report.check("no contradiction with the exponent-p guard", False, "criteria.earnley_guard")
        expected = _expected_aut_log(spec)
        if expected is not None:
            report.check(f"|Aut| = p^{expected}", aut["order"] == [P.p, expected], "homs.autcent_order")
        if spec is not None and spec.family in ("B", "C"):
            report.check("Aut elementary abelian", aut["elementary_abelian"] is True, "criteria + solver")
            sanity = homs.central_sanity_suite(P, args.trials, seed=_seed(args))
            report.data["sampled_central_automorphisms"] = {
                "trials": sanity.trials,
                "seed": _seed(args),
                "all_commute": sanity.all_commute,
                "all_order_p": sanity.all_order_p,
            }
            report.check("sampled central automorphisms commute", sanity.all_commute, "homs.central_sanity_suite")
            report.check("sampled central automorphisms have order dividing p", sanity.all_order_p, "homs.central_sanity_suite")
        elif spec is not None and spec.family == "A" and P.p % 2:
            report.check("Aut abelian", aut["abelian"] is True, "criteria.adney_yen + solver")
    report.data["aut"] = aut
    return report, None


def cmd_oracle(args) -> tuple[Report, None]:
    P, spec, source = _load(args)
    report = Report("oracle", source)
    report.data["presentation"] = presentation_section(P)
    if not report.check("presentation is consistent", validate_consistency(P).ok, "presentation.validate_consistency"):
        return report, None
    if P.order > args.cap:
        raise UsageError(f"|G| = {P.p}^{P.log_order} exceeds the oracle cap {args.cap}")
    t = time.monotonic()
    bf = solver.bruteforce_aut(P, cap=args.cap, keep_images=False)
    verdict = solver.verify_all_central(P, _budget(args), workers=args.workers, ordering=args.ordering)
    report.timings["oracle"] = time.monotonic() - t
    report.data["oracle"] = {"aut_count": bf.count, "central_aut_count": bf.central, "solver_verdict": verdict.kind.value}
    if verdict.kind is solver.VerdictKind.INCONCLUSIVE:
        report.inconclusive = True
    else:
        agree = (verdict.kind is solver.VerdictKind.ALL_CENTRAL) == (bf.count == bf.central)
        report.check("solver verdict agrees with brute force", agree, "solver.bruteforce_aut")
    return report, None


_FIXTURE_FILES = {"A": "family_a", "B": "family_b", "C": "family_c"}
SWEEP_LIMIT = 3**16


def cmd_fixtures(args) -> tuple[Report, None]:
    P, spec, source = _load(args)
    if spec is None or spec.family not in _FIXTURE_FILES:
        raise UsageError("fixtures needs --family A, B or C")
    report = Report("fixtures", source)
    system = symbolic.generate_system(P)
    fixtures = symbolic.load_fixtures(_FIXTURE_FILES[spec.family], system, spec.n)
    t = time.monotonic()
    sols, complete = solver.solve_level0(system, _budget(args), invertible_only=False)
    if not complete:
        report.inconclusive = True
        return report, None
    X = np.asarray(sols, dtype=np.int64).reshape(len(sols), system.nvars)
    inv = np.asarray([system.invertible(s) for s in sols], dtype=bool)
    on_all = symbolic.fixture_violations(fixtures, X, P.p)
    on_aut = symbolic.fixture_violations(fixtures, X[inv], P.p)
    section = {
        "fixtures": len(fixtures),
        "residue_solutions": len(sols),
        "automorphism_residues": int(inv.sum()),
        "violations_on_endomorphism_residues": {k: v for k, v in on_all.items() if v},
        "violations_on_automorphism_residues": {k: v for k, v in on_aut.items() if v},
    }
    report.check("fixtures hold on every automorphism residue", not any(on_aut.values()), "symbolic.fixture_violations")
    if args.sweep:
        if system.p**system.nvars > SWEEP_LIMIT:
            raise UsageError(f"exhaustive sweep over {P.p}^{system.nvars} assignments exceeds the limit")
        total, surviving, viol = symbolic.fixture_sweep(system, fixtures)
        section["sweep"] = {"assignments": _pk(P.p, system.nvars), "surviving": surviving, "violations": {k: v for k, v in viol.items() if v}}
        report.check("sweep agrees with backtracking", surviving == len(sols), "symbolic.fixture_sweep")
        report.check("system implies every fixture mod p", not any(viol.values()), "symbolic.fixture_sweep")
    report.timings["fixtures"] = time.monotonic() - t
    report.data["fixtures"] = section
    return report, None


COMMANDS = {
    "build": cmd_build,
    "analyze": cmd_analyze,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
    "fixtures": cmd_fixtures,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pgv", description="Verification toolkit for class-2 p-groups given by pc presentations.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, help_text in (
        ("build", "emit the presentation file of a family"),
        ("analyze", "structure and criteria"),
        ("verify", "full pipeline including the automorphism solver"),
        ("oracle", "brute-force Aut(G) for small groups"),
        ("fixtures", "cross-check hand-derived congruences"),
    ):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--family", choices=FAMILIES)
        sp.add_argument("-p", type=int)
        sp.add_argument("-n", type=int)
        sp.add_argument("--file")
        sp.add_argument("--json", action="store_true", help="emit the JSON report")
        sp.add_argument("--budget-nodes", type=int)
        sp.add_argument("--budget-seconds", type=float)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--ordering", choices=solver.ORDERINGS, default="most_constrained")
        if name == "build":
            sp.add_argument("-o", "--output", help="write the presentation here instead of stdout")
        if name == "verify":
            sp.add_argument("--trials", type=int, default=20, help="sampled central automorphism pairs")
        if name == "oracle":
            sp.add_argument("--cap", type=int, default=10**4)
        if name == "fixtures":
            sp.add_argument("--sweep", action="store_true", help="also enumerate every assignment mod p")
    return parser


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand; expected one of " + ", ".join(COMMANDS))
        if args.workers < 1:
            raise UsageError("--workers must be at least 1")
        report, text = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"pgv: error: {exc}", file=err)
        return EXIT_USAGE
    except structure.CapExceeded as exc:
        print(f"pgv: error: {exc}", file=err)
        return EXIT_USAGE
    if text is not None and getattr(args, "output", None):
        Path(args.output).write_text(text)
    elif text is not None and not args.json:
        # plain `build` prints just the presentation so it can be redirected
        out.write(text)
        return report.exit_code()
    out.write(to_json(report) if args.json else to_markdown(report))
    for k, v in report.timings.items():
        print(f"time {k}: {v:.2f}s", file=err)
    return report.exit_code()


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
