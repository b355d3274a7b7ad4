"""Published benchmark tables: inputs, reported optimal plans and risks.

These rows drive the reproduction harness (``dsplan table``) and the
regression suite.  Where independent verification (high-precision closed
form plus large Monte Carlo runs) shows a reported number to be a
typographical error, the row carries the verified value and a note; the
reported number is still emitted for the delta column.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from .model import AcceptanceLoss, CostModel, GammaPrior
from .optimizer import SearchConfig

__all__ = ["RefEntry", "BenchmarkRow", "ProportionRow", "BenchmarkTable", "TABLES", "get_table"]


@dataclass(frozen=True)
class RefEntry:
    """One published optimum: decision rule, risk, and plan coordinates
    (tuple layout: (n, tau, xi, c), (n, tau, xi), (n, tau) or
    (n, r, tau, xi, c) depending on the rule/scheme; None when only the
    risk was published)."""

    rule: str
    risk: float
    plan: Optional[Tuple[float, ...]]
    verified_risk: Optional[float] = None
    note: Optional[str] = None


@dataclass(frozen=True)
class BenchmarkRow:
    label: str
    prior: GammaPrior
    costs: CostModel
    loss: AcceptanceLoss
    refs: Tuple[RefEntry, ...]


@dataclass(frozen=True)
class ProportionRow:
    label: str
    prior: GammaPrior
    costs: CostModel
    loss: AcceptanceLoss
    dsp: float
    lsp: float


@dataclass(frozen=True)
class BenchmarkTable:
    table_id: int
    title: str
    kind: str  # "plans" | "proportions"
    scheme: str  # "type1" | "hybrid"
    search: SearchConfig
    rows: Tuple[object, ...]


_QUAD = AcceptanceLoss.polynomial((2.0, 2.0, 2.0))
_CUBIC = AcceptanceLoss.polynomial((2.0, 2.0, 2.0, 2.0))
_POWER52 = AcceptanceLoss((0.0, 1.0, 2.5), (2.0, 2.0, 2.0))

_BASE = CostModel(sampling_cost=0.5, time_cost=0.5, rejection_cost=30.0)
_NOTIME = CostModel(sampling_cost=0.5, time_cost=0.0, rejection_cost=30.0)
_HYBRID_BASE = CostModel(
    sampling_cost=0.5, time_cost=5.0, rejection_cost=30.0, salvage_value=0.3
)

_SEARCH_C1 = SearchConfig(c_max=1.0)
_SEARCH_C2 = SearchConfig(c_max=2.0)
_SEARCH_T2 = SearchConfig(c_max=2.0, tau_max=2.0)

# Verified correction for one transposed digit in the cubic-loss table:
# 40-digit evaluation of the closed form gives 17.0265186872 at the reported
# plan, and 48M Monte Carlo replications give 17.02672 +/- 0.00227 (the
# reported 17.0625 sits 15.8 standard errors away).
_CUBIC_ERRATUM = 17.0265186872
_CUBIC_ERRATUM_NOTE = (
    "reported 17.0625 is a digit transposition of the verified 17.0265 "
    "(closed form at 40-digit precision; 4.8e7-replication Monte Carlo)"
)


def _t1_row(a, b, risk, plan):
    return BenchmarkRow(
        label=f"a={a} b={b}",
        prior=GammaPrior(a, b),
        costs=_BASE,
        loss=_QUAD,
        refs=(RefEntry("dsp", risk, plan),),
    )


TABLE_1 = BenchmarkTable(
    1,
    "Optimal Type-I plans, quadratic loss, varying prior",
    "plans",
    "type1",
    _SEARCH_C1,
    tuple(
        _t1_row(a, b, risk, plan)
        for a, b, risk, plan in [
            (0.2, 0.2, 9.0726, (2, 0.4625, 0.2000, 0.9600)),
            (1.5, 0.8, 16.8439, (3, 0.4750, 0.2250, 0.1100)),
            (2.0, 0.8, 21.5046, (3, 0.6000, 0.2750, 0.1025)),
            (2.5, 0.6, 28.1949, (3, 0.8625, 0.3125, 0.8650)),
            (2.5, 0.8, 25.2777, (3, 0.7250, 0.3000, 0.3550)),
            (2.5, 1.0, 22.0361, (3, 0.5625, 0.2625, 0.0725)),
            (3.0, 0.8, 28.0087, (3, 0.8250, 0.3125, 0.7125)),
            (3.5, 0.8, 29.7131, (2, 0.8125, 0.4125, 0.4400)),
            (10.0, 3.0, 29.8053, (1, 0.4375, 0.4750, 0.8075)),
        ]
    ),
)


def _t2_row(a, b, dsp_risk, dsp_plan, lam_risk, lam_plan):
    return BenchmarkRow(
        label=f"a={a} b={b}",
        prior=GammaPrior(a, b),
        costs=_NOTIME,
        loss=_QUAD,
        refs=(
            RefEntry("dsp", dsp_risk, dsp_plan),
            RefEntry("lam", lam_risk, lam_plan),
        ),
    )


TABLE_2 = BenchmarkTable(
    2,
    "Shrinkage rule vs MLE rule, zero time cost",
    "plans",
    "type1",
    _SEARCH_T2,
    tuple(
        _t2_row(*args)
        for args in [
            (0.2, 0.2, 8.8228, (2, 0.6000, 0.1875, 1.1575), 12.1499, (4, 0.0270, 0.1080)),
            (1.5, 0.8, 16.5825, (3, 0.7000, 0.1750, 1.0000), 16.6233, (3, 0.5262, 0.2631)),
            (2.0, 0.8, 21.1398, (4, 1.1625, 0.2000, 1.7975), 21.2153, (3, 0.6051, 0.3026)),
            (2.5, 0.4, 29.7506, (1, 0.8000, 0.3250, 1.4400), 29.7506, (1, 0.7978, 0.7978)),
            (2.5, 0.6, 27.7266, (3, 1.2125, 0.2750, 1.3875), 27.7834, (3, 0.8537, 0.4268)),
            (2.5, 0.8, 24.8419, (4, 1.3125, 0.3000, 0.3750), 24.9367, (3, 0.7077, 0.3539)),
            (2.5, 1.0, 21.7081, (4, 1.1125, 0.2250, 0.9450), 21.7640, (3, 0.5483, 0.2742)),
            (3.0, 0.8, 27.5581, (3, 1.1625, 0.3000, 0.8650), 27.6136, (3, 0.8170, 0.4085)),
            (3.5, 0.8, 29.2789, (2, 1.0125, 0.2750, 1.6600), 29.2789, (2, 1.0037, 0.5019)),
            (10.0, 3.0, 29.5166, (2, 0.8000, 0.2625, 1.0250), 29.5166, (2, 0.7928, 0.3964)),
        ]
    ),
)


def _t3_row(a, b, lsp_risk, dsp_risk, dsp_plan):
    return BenchmarkRow(
        label=f"a={a} b={b}",
        prior=GammaPrior(a, b),
        costs=_BASE,
        loss=_QUAD,
        refs=(
            RefEntry("lsp", lsp_risk, None),
            RefEntry("dsp", dsp_risk, dsp_plan),
        ),
    )


TABLE_3 = BenchmarkTable(
    3,
    "Shrinkage rule vs Bayesian rule, quadratic loss",
    "plans",
    "type1",
    _SEARCH_C1,
    tuple(
        _t3_row(*args)
        for args in [
            (0.1, 0.2, 6.1832, 6.1832, (2, 0.4000, 0.2000, 0.8050)),
            (1.0, 0.2, 24.8966, 24.8966, (3, 0.8250, 0.3125, 0.6700)),
            (1.5, 0.8, 16.8439, 16.8439, (3, 0.4750, 0.2250, 0.1100)),
            (1.5, 2.0, 5.3750, 5.3750, (0, 0.0, 0.0, 0.0)),
            (2.5, 0.8, 25.2777, 25.2777, (3, 0.7250, 0.3000, 0.3550)),
            (2.5, 1.0, 22.0361, 22.0361, (3, 0.5625, 0.2625, 0.0725)),
            (2.5, 1.2, 18.3194, 18.3194, (0, 0.0, 0.0, 0.0)),
            (3.0, 0.8, 28.0087, 28.0087, (3, 0.8250, 0.3125, 0.7125)),
            (3.5, 0.8, 29.7131, 29.7131, (2, 0.8125, 0.4125, 0.4400)),
        ]
    ),
)

TABLE_4 = BenchmarkTable(
    4,
    "Proportion of acceptance, varying prior",
    "proportions",
    "type1",
    _SEARCH_C1,
    tuple(
        ProportionRow(f"a={a} b={b}", GammaPrior(a, b), _BASE, _QUAD, dsp, lsp)
        for a, b, dsp, lsp in [
            (1.7, 0.2, 0.8440, 0.8424),
            (2.1, 0.3, 0.7428, 0.7443),
            (2.4, 0.4, 0.7414, 0.7262),
        ]
    ),
)

_P5_PRIOR = GammaPrior(2.5, 0.8)


def _t5_loss_row(label, coefs, dsp, lsp):
    return ProportionRow(
        label, _P5_PRIOR, _BASE, AcceptanceLoss.polynomial(coefs), dsp, lsp
    )


def _t5_cost_row(label, costs, dsp, lsp):
    return ProportionRow(label, _P5_PRIOR, costs, _QUAD, dsp, lsp)


TABLE_5 = BenchmarkTable(
    5,
    "Proportion of acceptance, varying loss coefficients and costs",
    "proportions",
    "type1",
    _SEARCH_C1,
    (
        _t5_loss_row("a0=13.5", (13.5, 2.0, 2.0), 0.7348, 0.7219),
        _t5_loss_row("a0=14.0", (14.0, 2.0, 2.0), 0.7170, 0.7096),
        _t5_loss_row("a0=14.5", (14.5, 2.0, 2.0), 0.8198, 0.8134),
        _t5_loss_row("a1=10.2", (2.0, 10.2, 2.0), 0.6176, 0.6122),
        _t5_loss_row("a1=10.5", (2.0, 10.5, 2.0), 0.6193, 0.5956),
        _t5_loss_row("a1=10.8", (2.0, 10.8, 2.0), 0.5981, 0.5822),
        _t5_loss_row("a2=6.0", (2.0, 2.0, 6.0), 0.8595, 0.8624),
        _t5_loss_row("a2=6.5", (2.0, 2.0, 6.5), 0.7662, 0.7686),
        _t5_loss_row("a2=6.8", (2.0, 2.0, 6.8), 0.7661, 0.7586),
        _t5_cost_row("Cs=3.0", CostModel(3.0, 0.5, 30.0), 0.9309, 0.9354),
        _t5_cost_row("Cs=3.5", CostModel(3.5, 0.5, 30.0), 0.8911, 0.8988),
        _t5_cost_row("Cs=4.0", CostModel(4.0, 0.5, 30.0), 0.8913, 0.8981),
        _t5_cost_row("Ct=3.0", CostModel(0.5, 3.0, 30.0), 0.9980, 0.9976),
        _t5_cost_row("Ct=3.5", CostModel(0.5, 3.5, 30.0), 0.9988, 0.9988),
        _t5_cost_row("Ct=4.0", CostModel(0.5, 4.0, 30.0), 0.9981, 0.9980),
        _t5_cost_row("Cr=17.5", CostModel(0.5, 0.5, 17.5), 0.7494, 0.7389),
        _t5_cost_row("Cr=18.0", CostModel(0.5, 0.5, 18.0), 0.7180, 0.7081),
        _t5_cost_row("Cr=18.5", CostModel(0.5, 0.5, 18.5), 0.8030, 0.8008),
    ),
)


def _t6_row(a, b, risk, plan, verified=None, note=None):
    return BenchmarkRow(
        label=f"a={a} b={b}",
        prior=GammaPrior(a, b),
        costs=_BASE,
        loss=_CUBIC,
        refs=(
            RefEntry("lsp", risk, None, verified, note),
            RefEntry("dsp", risk, plan, verified, note),
        ),
    )


TABLE_6 = BenchmarkTable(
    6,
    "Shrinkage rule vs Bayesian rule, cubic loss",
    "plans",
    "type1",
    _SEARCH_C2,
    (
        _t6_row(0.1, 0.2, 7.4606, (2, 0.8875, 0.3500, 1.4875)),
        _t6_row(0.5, 0.8, 10.0670, (3, 0.8500, 0.4250, 0.0875)),
        _t6_row(1.0, 0.2, 27.6919, (3, 1.3625, 0.5125, 1.2750)),
        _t6_row(
            1.0, 0.8, 17.0625, (4, 1.1375, 0.5000, 0.1750),
            _CUBIC_ERRATUM, _CUBIC_ERRATUM_NOTE,
        ),
        _t6_row(1.5, 0.8, 22.9149, (4, 1.3000, 0.5000, 0.6875)),
        _t6_row(2.5, 0.8, 29.7994, (2, 1.4500, 0.5750, 1.2000)),
        _t6_row(2.5, 1.0, 28.2333, (4, 1.3250, 0.5000, 1.2875)),
        _t6_row(2.5, 1.2, 26.3146, (4, 1.3250, 0.5000, 0.8875)),
    ),
)

TABLE_7 = BenchmarkTable(
    7,
    "Optimal Type-I plans, non-polynomial loss (exponents 0, 1, 5/2)",
    "plans",
    "type1",
    _SEARCH_C2,
    tuple(
        BenchmarkRow(
            label=f"a={a} b={b}",
            prior=GammaPrior(a, b),
            costs=_BASE,
            loss=_POWER52,
            refs=(RefEntry("dsp", risk, plan),),
        )
        for a, b, risk, plan in [
            (0.1, 0.2, 6.6966, (2, 0.6125, 0.2250, 1.6750)),
            (1.0, 0.2, 26.1494, (3, 1.0875, 0.3750, 1.1500)),
            (1.5, 0.8, 19.4142, (4, 0.9000, 0.3750, 0.0750)),
            (2.5, 0.8, 27.5525, (4, 1.0625, 0.3750, 1.0875)),
            (3.0, 0.8, 29.6926, (2, 1.0750, 0.3500, 1.8250)),
        ]
    ),
)


def _hybrid_row(label, prior, costs, risk, plan):
    return BenchmarkRow(
        label=label,
        prior=prior,
        costs=costs,
        loss=_QUAD,
        refs=(RefEntry("dsp", risk, plan),),
    )


def _hcosts(sampling=0.5, time=5.0, rejection=30.0, salvage=0.3):
    return CostModel(sampling, time, rejection, salvage)


TABLE_8 = BenchmarkTable(
    8,
    "Optimal hybrid plans, varying prior and time cost",
    "plans",
    "hybrid",
    _SEARCH_C1,
    (
        _hybrid_row("a=2.5 b=0.8", GammaPrior(2.5, 0.8), _HYBRID_BASE, 26.0338, (6, 3, 0.2000, 0.2750, 0.6600)),
        _hybrid_row("a=2.5 b=1.0", GammaPrior(2.5, 1.0), _HYBRID_BASE, 22.6437, (5, 3, 0.1875, 0.2625, 0.0725)),
        _hybrid_row("a=3.0 b=0.8", GammaPrior(3.0, 0.8), _HYBRID_BASE, 28.7890, (4, 2, 0.2375, 0.4250, 0.0075)),
        _hybrid_row("Ct=0", GammaPrior(2.5, 0.8), _hcosts(time=0.0), 24.6736, (4, 4, 0.8500, 0.3000, 0.3725)),
        _hybrid_row("Ct=8", GammaPrior(2.5, 0.8), _hcosts(time=8.0), 26.4672, (7, 3, 0.1625, 0.2750, 0.6600)),
        _hybrid_row("Ct=16", GammaPrior(2.5, 0.8), _hcosts(time=16.0), 27.2513, (7, 2, 0.1000, 0.2875, 0.5775)),
    ),
)

TABLE_9 = BenchmarkTable(
    9,
    "Optimal hybrid plans, varying sampling and rejection costs",
    "plans",
    "hybrid",
    _SEARCH_C1,
    (
        _hybrid_row("Cs=0.5", GammaPrior(2.5, 0.8), _HYBRID_BASE, 26.0338, (6, 3, 0.2000, 0.2750, 0.6600)),
        _hybrid_row("Cs=0.6", GammaPrior(2.5, 0.8), _hcosts(sampling=0.6), 26.5626, (5, 3, 0.2500, 0.2750, 0.6600)),
        _hybrid_row("Cs=0.7", GammaPrior(2.5, 0.8), _hcosts(sampling=0.7), 26.9114, (3, 2, 0.2750, 0.3125, 0.2400)),
        _hybrid_row("Cr=25", GammaPrior(2.5, 0.8), _hcosts(rejection=25.0), 23.3581, (4, 2, 0.2375, 0.3750, 0.3350)),
        _hybrid_row("Cr=30", GammaPrior(2.5, 0.8), _HYBRID_BASE, 26.0338, (6, 3, 0.2000, 0.2750, 0.6600)),
        _hybrid_row("Cr=40", GammaPrior(2.5, 0.8), _hcosts(rejection=40.0), 30.0071, (7, 4, 0.1750, 0.2375, 0.1075)),
    ),
)

TABLES = {t.table_id: t for t in [TABLE_1, TABLE_2, TABLE_3, TABLE_4, TABLE_5, TABLE_6, TABLE_7, TABLE_8, TABLE_9]}


def get_table(table_id: int) -> BenchmarkTable:
    if table_id not in TABLES:
        raise KeyError(f"unknown table id {table_id}; valid ids are 1..9")
    return TABLES[table_id]
