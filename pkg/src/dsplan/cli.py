"""Command-line front end: risk evaluation, plan optimization, simulation,
table reproduction and rule comparison.

Configuration is a single YAML document (``--dump-config`` prints the
effective one).  Results go to stdout as line-delimited JSON records, with
risks both at full precision and rounded to the 4 decimals used by the
published tables; ``table`` additionally writes a locale-independent CSV.

Exit status: 0 on success, 2 on configuration errors, 3 on numeric domain
errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import yaml

from . import benchmarks
from .dsp_risk import dsp_risk_type1, lam_risk_type1
from .errors import (
    ConfigError,
    DomainError,
    DsplanError,
    UnboundedSearchError,
)
from .hybrid_risk import dsp_risk_hybrid
from .lsp import lsp_risk_type1
from .model import (
    AcceptanceLoss,
    CostModel,
    GammaPrior,
    HybridSamplingPlan,
    LamPlan,
    LspPlan,
    RiskReport,
    SamplingPlan,
)
from .optimizer import (
    SearchConfig,
    optimize_dsp_hybrid,
    optimize_dsp_type1,
    optimize_lam_type1,
    optimize_lsp_type1,
)
from .simulate import mc_bayes_risk, proportion_of_acceptance

__all__ = ["RunConfig", "main"]

_DEFAULT_SIM = {"replications": 10_000, "seed": 20250801}


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration (prior, costs, loss, censoring kind,
    search knobs, simulation knobs)."""

    prior: GammaPrior
    costs: CostModel
    loss: AcceptanceLoss
    censoring: str = "type1"
    search: SearchConfig = SearchConfig()
    replications: int = _DEFAULT_SIM["replications"]
    seed: int = _DEFAULT_SIM["seed"]

    @classmethod
    def default(cls) -> "RunConfig":
        return cls(
            prior=GammaPrior(2.5, 0.8),
            costs=CostModel(0.5, 0.5, 30.0, 0.0),
            loss=AcceptanceLoss.polynomial((2.0, 2.0, 2.0)),
        )

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        if not isinstance(doc, dict):
            raise ConfigError("configuration document must be a mapping")
        unknown = set(doc) - {"prior", "costs", "loss", "censoring", "search", "simulation"}
        if unknown:
            raise ConfigError(f"unknown configuration sections: {sorted(unknown)}")
        try:
            prior_d = doc.get("prior", {})
            prior = GammaPrior(float(prior_d["a"]), float(prior_d["b"]))
            costs_d = doc.get("costs", {})
            costs = CostModel(
                sampling_cost=float(costs_d.get("sampling", 0.5)),
                time_cost=float(costs_d.get("time", 0.5)),
                rejection_cost=float(costs_d.get("rejection", 30.0)),
                salvage_value=float(costs_d.get("salvage", 0.0)),
            )
            loss_d = doc.get("loss", {})
            loss = AcceptanceLoss(
                tuple(float(p) for p in loss_d.get("exponents", (0, 1, 2))),
                tuple(float(c) for c in loss_d.get("coefficients", (2, 2, 2))),
            )
            censoring = doc.get("censoring", {}).get("kind", "type1")
            if censoring not in ("type1", "hybrid"):
                raise ConfigError(f"censoring kind must be type1 or hybrid, got {censoring!r}")
            search_d = dict(doc.get("search", {}))
            known = set(SearchConfig.__dataclass_fields__)
            bad = set(search_d) - known
            if bad:
                raise ConfigError(f"unknown search keys: {sorted(bad)}")
            search = SearchConfig(**search_d)
            sim_d = doc.get("simulation", {})
            replications = int(sim_d.get("replications", _DEFAULT_SIM["replications"]))
            seed = int(sim_d.get("seed", _DEFAULT_SIM["seed"]))
            if replications < 1:
                raise ConfigError("simulation.replications must be positive")
            if not 0 <= seed < 2**64:
                raise ConfigError("simulation.seed must fit in an unsigned 64-bit integer")
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError, DomainError) as exc:
            raise ConfigError(f"invalid configuration: {exc}") from exc
        return cls(prior, costs, loss, censoring, search, replications, seed)

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = yaml.safe_load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read configuration {path!r}: {exc}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"malformed YAML in {path!r}: {exc}") from exc
        return cls.from_dict(doc or {})

    def to_dict(self) -> dict:
        search = {
            name: getattr(self.search, name)
            for name in SearchConfig.__dataclass_fields__
        }
        return {
            "prior": {"a": self.prior.a, "b": self.prior.b},
            "costs": {
                "sampling": self.costs.sampling_cost,
                "time": self.costs.time_cost,
                "rejection": self.costs.rejection_cost,
                "salvage": self.costs.salvage_value,
            },
            "loss": {
                "exponents": list(self.loss.exponents),
                "coefficients": list(self.loss.coefficients),
            },
            "censoring": {"kind": self.censoring},
            "search": search,
            "simulation": {"replications": self.replications, "seed": self.seed},
        }

    def dump(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True, default_flow_style=False)


def _emit(record: dict) -> None:
    sys.stdout.write(json.dumps(record, sort_keys=True) + "\n")


def _risk_fields(report: RiskReport) -> dict:
    rec = report.to_record()
    rec["risk_4dp"] = f"{report.risk:.4f}"
    return rec


def _build_plan(cfg: RunConfig, args) -> SamplingPlan | HybridSamplingPlan:
    xi = math.inf if str(args.xi).lower() in ("inf", "+inf", "infinity") else float(args.xi)
    if cfg.censoring == "hybrid":
        if args.r is None:
            raise ConfigError("hybrid censoring requires --r")
        return HybridSamplingPlan(args.n, args.tau, xi, args.c, args.r)
    return SamplingPlan(args.n, args.tau, xi, args.c)


def _evaluate(cfg: RunConfig, rule: str, args) -> RiskReport:
    if rule == "dsp":
        plan = _build_plan(cfg, args)
        if isinstance(plan, HybridSamplingPlan):
            return dsp_risk_hybrid(plan, cfg.prior, cfg.costs, cfg.loss, as_printed=args.as_printed)
        return dsp_risk_type1(plan, cfg.prior, cfg.costs, cfg.loss)
    if cfg.censoring == "hybrid":
        raise ConfigError(f"closed-form {rule} risk is unavailable under hybrid censoring")
    if rule == "lam":
        return lam_risk_type1(args.n, args.tau, float(args.xi), cfg.prior, cfg.costs, cfg.loss)
    if rule == "lsp":
        return lsp_risk_type1(args.n, args.tau, cfg.prior, cfg.costs, cfg.loss)
    raise ConfigError(f"unknown rule {rule!r}")


def _mc_plan(cfg: RunConfig, rule: str, report: RiskReport):
    """Plan object handed to the simulator for a given rule/report."""
    plan = report.plan
    if isinstance(plan, (SamplingPlan, HybridSamplingPlan)):
        return plan
    if isinstance(plan, LamPlan):
        # The simulator applies the MLE rule itself; c is inert but must
        # be positive for plan validation.
        return SamplingPlan(plan.n, plan.tau, plan.xi, 1.0)
    if isinstance(plan, LspPlan):
        if plan.n == 0:
            return SamplingPlan(0, 0.0, 0.0, 0.0)
        return SamplingPlan(plan.n, plan.tau, 0.0, 1.0)
    raise ConfigError(f"cannot simulate plan type {type(plan).__name__}")


def cmd_risk(cfg: RunConfig, args) -> int:
    rule = args.rule
    report = _evaluate(cfg, rule, args)
    if args.validate:
        mc = mc_bayes_risk(
            rule, _mc_plan(cfg, rule, report), cfg.prior, cfg.costs, cfg.loss,
            args.validate, args.seed if args.seed is not None else cfg.seed,
        )
        report = report.with_mc(mc.estimate, mc.se)
    rec = {"command": "risk", "rule": rule, **_risk_fields(report)}
    _emit(rec)
    return 0


def _optimize(cfg: RunConfig, rule: str, as_printed: bool = False):
    stats: dict = {}
    if cfg.censoring == "hybrid":
        if rule != "dsp":
            raise ConfigError("hybrid censoring supports optimization of the dsp rule only")
        report = optimize_dsp_hybrid(
            cfg.prior, cfg.costs, cfg.loss, cfg.search, as_printed=as_printed, stats_out=stats
        )
    elif rule == "dsp":
        report = optimize_dsp_type1(cfg.prior, cfg.costs, cfg.loss, cfg.search, stats_out=stats)
    elif rule == "lsp":
        report = optimize_lsp_type1(cfg.prior, cfg.costs, cfg.loss, cfg.search, stats_out=stats)
    elif rule == "lam":
        report = optimize_lam_type1(cfg.prior, cfg.costs, cfg.loss, cfg.search, stats_out=stats)
    else:
        raise ConfigError(f"unknown rule {rule!r}")
    return report, stats


def cmd_optimize(cfg: RunConfig, args) -> int:
    if args.exhaustive:
        cfg = RunConfig(
            cfg.prior, cfg.costs, cfg.loss, cfg.censoring,
            _replace_search(cfg.search, exhaustive=True), cfg.replications, cfg.seed,
        )
    report, stats = _optimize(cfg, args.rule, as_printed=args.as_printed)
    rec = {
        "command": "optimize",
        "rule": args.rule,
        **_risk_fields(report),
        "evaluations": stats.get("evaluations"),
        "seconds": round(stats.get("seconds", 0.0), 3),
    }
    _emit(rec)
    return 0


def _replace_search(search: SearchConfig, **kw) -> SearchConfig:
    fields = {name: getattr(search, name) for name in SearchConfig.__dataclass_fields__}
    fields.update(kw)
    return SearchConfig(**fields)


def cmd_simulate(cfg: RunConfig, args) -> int:
    rule = args.rule
    plan = _build_plan(cfg, args)
    reps = args.replications or cfg.replications
    seed = args.seed if args.seed is not None else cfg.seed
    if args.proportion:
        prop = proportion_of_acceptance(rule, plan, cfg.prior, cfg.costs, cfg.loss, reps, seed)
        se = math.sqrt(max(prop * (1 - prop), 1e-12) / reps)
        _emit({
            "command": "simulate", "rule": rule, **plan.to_record(),
            "proportion": prop, "proportion_4dp": f"{prop:.4f}",
            "binomial_se": se, "replications": reps, "seed": seed,
        })
    else:
        mc = mc_bayes_risk(rule, plan, cfg.prior, cfg.costs, cfg.loss, reps, seed)
        _emit({
            "command": "simulate", "rule": rule, **plan.to_record(),
            "mc_risk": mc.estimate, "mc_risk_4dp": f"{mc.estimate:.4f}",
            "mc_se": mc.se, "replications": reps, "seed": seed,
        })
    return 0


_TABLE_FIELDS = [
    "table", "row", "label", "rule", "mode", "n", "r", "tau", "xi", "c",
    "risk", "risk_4dp", "ref_risk", "abs_delta", "verified_risk",
    "proportion", "ref_proportion", "binomial_se", "note", "evaluations", "seconds",
]


def _fmt_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _table_plan_row(table, idx, row, ref, cfg_search, points_only, as_printed, replications, seed):
    rec = {
        "table": table.table_id, "row": idx, "label": row.label, "rule": ref.rule,
        "mode": "point" if points_only else "optimize",
        "ref_risk": ref.risk, "verified_risk": ref.verified_risk, "note": ref.note,
    }
    target = ref.verified_risk if ref.verified_risk is not None else ref.risk
    t0 = time.perf_counter()
    stats: dict = {}
    if points_only:
        report = _point_eval(table, row, ref, as_printed)
        if report is None:
            rec["note"] = (rec["note"] or "") + " no published plan; skipped"
            return rec
    else:
        run = RunConfig(row.prior, row.costs, row.loss,
                        "hybrid" if table.scheme == "hybrid" else "type1",
                        cfg_search, replications, seed)
        report, stats = _optimize(run, ref.rule, as_printed=as_printed)
    rec.update(_risk_fields(report))
    rec["abs_delta"] = abs(report.risk - target)
    rec["evaluations"] = stats.get("evaluations")
    rec["seconds"] = round(time.perf_counter() - t0, 3)
    return rec


def _point_eval(table, row, ref, as_printed) -> Optional[RiskReport]:
    if ref.plan is None:
        # Published risk without coordinates (Bayesian-rule columns): use
        # the companion rule's (n, tau), where the published optima agree.
        host = next((e for e in row.refs if e.plan is not None), None)
        if host is None:
            return None
        n, tau = int(host.plan[0]), float(host.plan[1])
        if n == 0:
            return lsp_risk_type1(0, 0.0, row.prior, row.costs, row.loss)
        return lsp_risk_type1(n, tau, row.prior, row.costs, row.loss)
    if table.scheme == "hybrid":
        n, r, tau, xi, c = ref.plan
        plan = HybridSamplingPlan(int(n), tau, xi, c, int(r))
        return dsp_risk_hybrid(plan, row.prior, row.costs, row.loss, as_printed=as_printed)
    if ref.rule == "lam":
        n, tau, xi = ref.plan
        return lam_risk_type1(int(n), tau, xi, row.prior, row.costs, row.loss)
    if ref.rule == "lsp":
        n, tau = ref.plan[0], ref.plan[1]
        return lsp_risk_type1(int(n), float(tau), row.prior, row.costs, row.loss)
    n, tau, xi, c = ref.plan
    if int(n) == 0:
        plan = SamplingPlan.accept_all() if xi == 0 else SamplingPlan.reject_all()
    else:
        plan = SamplingPlan(int(n), tau, xi, c)
    return dsp_risk_type1(plan, row.prior, row.costs, row.loss)


def _table_proportion_rows(table, idx, row, cfg_search, replications, seed):
    run = RunConfig(row.prior, row.costs, row.loss, "type1", cfg_search, replications, seed)
    out = []
    for rule, ref_p in (("dsp", row.dsp), ("lsp", row.lsp)):
        t0 = time.perf_counter()
        report, stats = _optimize(run, rule)
        plan = _mc_plan(run, rule, report)
        prop = proportion_of_acceptance(rule, plan, row.prior, row.costs, row.loss, replications, seed)
        se = math.sqrt(max(prop * (1 - prop), 1e-12) / replications)
        rec = {
            "table": table.table_id, "row": idx, "label": row.label, "rule": rule,
            "mode": "optimize+simulate", **_risk_fields(report),
            "proportion": prop, "ref_proportion": ref_p,
            "abs_delta": abs(prop - ref_p), "binomial_se": se,
            "evaluations": stats.get("evaluations"),
            "seconds": round(time.perf_counter() - t0, 3),
        }
        out.append(rec)
    return out


def cmd_table(cfg: RunConfig, args) -> int:
    try:
        table = benchmarks.get_table(args.id)
    except KeyError as exc:
        raise ConfigError(str(exc)) from exc
    reps = args.replications or cfg.replications
    seed = args.seed if args.seed is not None else cfg.seed
    search = table.search if args.default_search else cfg.search
    if args.exhaustive:
        search = _replace_search(search, exhaustive=True)

    jobs = []
    if table.kind == "plans":
        for idx, row in enumerate(table.rows):
            for ref in row.refs:
                jobs.append((idx, row, ref))

        def work(job):
            idx, row, ref = job
            try:
                return [_table_plan_row(table, idx, row, ref, search,
                                        args.points_only, args.as_printed, reps, seed)]
            except DsplanError as exc:
                return [{"table": table.table_id, "row": idx, "label": row.label,
                         "rule": ref.rule, "note": f"error: {exc}"}]
    else:
        for idx, row in enumerate(table.rows):
            jobs.append((idx, row))

        def work(job):
            idx, row = job
            try:
                return _table_proportion_rows(table, idx, row, search, reps, seed)
            except DsplanError as exc:
                return [{"table": table.table_id, "row": idx, "label": row.label,
                         "note": f"error: {exc}"}]

    if args.threads and args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(work, jobs))
    else:
        results = [work(j) for j in jobs]
    records = [rec for chunk in results for rec in chunk]
    records.sort(key=lambda r: (r["row"], r.get("rule") or ""))
    for rec in records:
        _emit(rec)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=_TABLE_FIELDS, extrasaction="ignore")
            writer.writeheader()
            for rec in records:
                writer.writerow({k: _fmt_cell(rec.get(k)) for k in _TABLE_FIELDS})
    return 0


def cmd_compare(cfg: RunConfig, args) -> int:
    if cfg.censoring == "hybrid":
        report, stats = _optimize(cfg, "dsp", as_printed=args.as_printed)
        _emit({"command": "compare", "rule": "dsp", **_risk_fields(report),
               "evaluations": stats.get("evaluations")})
        # No closed form exists for the other rules under hybrid censoring;
        # estimate them by simulation at the optimal plan's coordinates.
        plan = report.plan
        for rule in ("lsp", "lam"):
            mc = mc_bayes_risk(rule, plan, cfg.prior, cfg.costs, cfg.loss,
                               max(cfg.replications, 10_000), cfg.seed)
            _emit({"command": "compare", "rule": rule, **plan.to_record(),
                   "mc_risk": mc.estimate, "mc_se": mc.se,
                   "note": "simulated at the optimal dsp plan"})
        return 0
    for rule in ("dsp", "lsp", "lam"):
        try:
            report, stats = _optimize(cfg, rule)
        except UnboundedSearchError as exc:
            _emit({"command": "compare", "rule": rule, "note": f"skipped: {exc}"})
            continue
        _emit({"command": "compare", "rule": rule, **_risk_fields(report),
               "evaluations": stats.get("evaluations")})
    return 0


def _add_plan_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True, help="sample size")
    p.add_argument("--tau", type=float, default=0.0, help="censoring time")
    p.add_argument("--xi", default=0.0, help="acceptance threshold (number or 'inf')")
    p.add_argument("--c", type=float, default=0.0, help="shrinkage constant")
    p.add_argument("--r", type=int, default=None, help="failure threshold (hybrid)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dsplan",
        description="Bayes risks and optimal acceptance sampling plans for "
        "exponential lifetimes under Type-I and hybrid censoring.",
    )
    parser.add_argument("--config", help="YAML configuration path")
    parser.add_argument("--dump-config", action="store_true",
                        help="print the effective configuration and exit")
    sub = parser.add_subparsers(dest="command")

    pr = sub.add_parser("risk", help="closed-form risk of a given plan")
    _add_plan_flags(pr)
    pr.add_argument("--rule", choices=("dsp", "lsp", "lam"), default="dsp")
    pr.add_argument("--validate", type=int, default=0, metavar="N",
                    help="attach an N-replication Monte Carlo estimate")
    pr.add_argument("--seed", type=int, default=None)
    pr.add_argument("--as-printed", action="store_true",
                    help="hybrid mixture variant with the uncorrected stopped-block rate")
    pr.set_defaults(func=cmd_risk)

    po = sub.add_parser("optimize", help="grid-search the optimal plan")
    po.add_argument("--rule", choices=("dsp", "lsp", "lam"), default="dsp")
    po.add_argument("--exhaustive", action="store_true",
                    help="disable coarse-to-fine refinement (slow verification mode)")
    po.add_argument("--as-printed", action="store_true")
    po.set_defaults(func=cmd_optimize)

    ps = sub.add_parser("simulate", help="Monte Carlo risk or acceptance proportion")
    _add_plan_flags(ps)
    ps.add_argument("--rule", choices=("dsp", "lsp", "lam"), default="dsp")
    ps.add_argument("--replications", type=int, default=0)
    ps.add_argument("--seed", type=int, default=None)
    ps.add_argument("--proportion", action="store_true",
                    help="report the acceptance proportion instead of the risk")
    ps.set_defaults(func=cmd_simulate)

    pt = sub.add_parser("table", help="reproduce a published benchmark table")
    pt.add_argument("--id", type=int, required=True, help="table id, 1..9")
    pt.add_argument("--out", help="CSV output path")
    pt.add_argument("--points-only", action="store_true",
                    help="evaluate closed forms at the published plans instead of re-optimizing")
    pt.add_argument("--threads", type=int, default=1)
    pt.add_argument("--replications", type=int, default=0)
    pt.add_argument("--seed", type=int, default=None)
    pt.add_argument("--exhaustive", action="store_true")
    pt.add_argument("--as-printed", action="store_true")
    pt.add_argument("--default-search", action="store_true", default=True,
                    help=argparse.SUPPRESS)
    pt.add_argument("--config-search", dest="default_search", action="store_false",
                    help="use the configured search grid instead of the table's published one")
    pt.set_defaults(func=cmd_table)

    pc = sub.add_parser("compare", help="optimize all rules at a shared configuration")
    pc.add_argument("--as-printed", action="store_true")
    pc.set_defaults(func=cmd_compare)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.load(args.config) if args.config else RunConfig.default()
        if args.dump_config:
            sys.stdout.write(cfg.dump())
            return 0
        if not args.command:
            parser.print_usage(sys.stderr)
            return 2
        return args.func(cfg, args)
    except ConfigError as exc:
        _emit({"error": {"kind": "config", "message": str(exc)}})
        return 2
    except UnboundedSearchError as exc:
        _emit({"error": {"kind": "config", "message": str(exc)}})
        return 2
    except DomainError as exc:
        _emit({"error": {"kind": "domain", "message": str(exc)}})
        return 3


if __name__ == "__main__":
    sys.exit(main())
