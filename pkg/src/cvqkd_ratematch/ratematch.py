"""Code-rate matching strategies and operating-point selection.

A fixed-rate code (rate R, reconciliation efficiency beta) decodes reliably
only at or above its threshold SNR, min_snr = 2^(2R/beta) - 1.  When the
channel is better than that, the options compared here are:

* Unmatched: keep running the code; it still transports b = 2R bits per
  symbol, but the Holevo bound keeps growing with the SNR, eating the margin.
* IdealRate: hypothetical codes of arbitrary rate at the same beta,
  b = beta * log2(1 + snr).  Upper reference curve.
* ArtificialNoise: Bob injects trusted digital noise xi_art until the SNR sits
  exactly at the threshold again.  b stays 2R while the trusted noise also
  lowers the Holevo bound, so this dominates Unmatched pointwise.
* ExternalBaseline: user-supplied (t_total, snr, beta_eff) tuples from some
  other rate-adaptation scheme, evaluated only at their own points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Sequence, TextIO

import numpy as np

from .linkmodel import InfoBudget, LinkParams, holevo_bound, info_budget, mutual_information_ab, snr

# evaluate_strategy tolerance on the threshold precondition (absolute, SNR units)
SNR_PRECONDITION_TOL = 1e-12
# required xi_art values in [-XI_ART_SNAP, 0) are floating-point zeros
XI_ART_SNAP = 1e-10


class BelowThresholdError(ValueError):
    """Link SNR below the code threshold where the strategy needs it."""


class InfeasibleError(ValueError):
    """No operating point with t_ch <= 1 reaches the code threshold."""


class OptimizationError(RuntimeError):
    """The modulation-variance search found no interior maximum."""


@dataclass(frozen=True)
class CodeSpec:
    """Fixed-rate FEC code abstraction: rate in bits per binary channel use."""

    rate: float
    beta: float
    label: str = ""

    def __post_init__(self):
        if not 0.0 < self.rate < 1.0:
            raise ValueError(f"code rate must lie in (0, 1), got {self.rate}")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError(f"beta must lie in (0, 1], got {self.beta}")


@dataclass(frozen=True)
class BaselinePoint:
    """One externally supplied operating point of a competing scheme."""

    t_total: float
    snr: float
    beta_eff: float

    def __post_init__(self):
        if not 0.0 < self.t_total <= 1.0:
            raise ValueError(f"t_total must lie in (0, 1], got {self.t_total}")
        if self.snr < 0:
            raise ValueError(f"snr must be >= 0, got {self.snr}")
        if not 0.0 < self.beta_eff <= 1.0:
            raise ValueError(f"beta_eff must lie in (0, 1], got {self.beta_eff}")


class StrategyKind(str, Enum):
    UNMATCHED = "unmatched"
    IDEAL_RATE = "ideal_rate"
    ARTIFICIAL_NOISE = "artificial_noise"
    EXTERNAL_BASELINE = "external_baseline"


@dataclass(frozen=True)
class Strategy:
    """A rate-handling strategy; only ExternalBaseline carries data points."""

    kind: StrategyKind
    baseline_points: tuple[BaselinePoint, ...] = ()

    def __post_init__(self):
        if self.kind is StrategyKind.EXTERNAL_BASELINE:
            if not self.baseline_points:
                raise ValueError("external baseline strategy needs a nonempty point list")
        elif self.baseline_points:
            raise ValueError(f"{self.kind.value} strategy takes no baseline points")

    @property
    def name(self) -> str:
        return self.kind.value


UNMATCHED = Strategy(StrategyKind.UNMATCHED)
IDEAL_RATE = Strategy(StrategyKind.IDEAL_RATE)
ARTIFICIAL_NOISE = Strategy(StrategyKind.ARTIFICIAL_NOISE)

# fixed ordering of strategy rows within one t_ch of a sweep table
_STRATEGY_ORDER = {
    StrategyKind.UNMATCHED: 0,
    StrategyKind.IDEAL_RATE: 1,
    StrategyKind.ARTIFICIAL_NOISE: 2,
    StrategyKind.EXTERNAL_BASELINE: 3,
}


def external_baseline(points: Iterable[BaselinePoint]) -> Strategy:
    return Strategy(StrategyKind.EXTERNAL_BASELINE, tuple(points))


BUILTIN_CODES = {
    "met-ldpc-0.1": CodeSpec(rate=0.1, beta=0.9395, label="met-ldpc-0.1"),
}


def min_snr(code: CodeSpec) -> float:
    """Threshold SNR of the code: 2^(2R/beta) - 1.

    Inverse of beta * log2(1 + snr) = 2R, i.e. the SNR at which the code's
    payload exactly matches the reconciliation-efficiency-scaled heterodyne
    mutual information.
    """
    return float(2.0 ** (2.0 * code.rate / code.beta) - 1.0)


def required_artificial_noise(p: LinkParams, code: CodeSpec) -> float:
    """Digital noise that pins snr(p) to the code threshold.

    xi_art = t_ch*t_rec*v_mod / min_snr - 2 - xi_ch - xi_rec.  Returns the raw
    value; a negative result means the link is below threshold (a signal for
    the caller, not an error here).  p.xi_art does not enter.
    """
    return p.t_total * p.v_mod / min_snr(code) - 2.0 - p.xi_ch - p.xi_rec


@dataclass(frozen=True)
class OperatingPoint:
    """A scenario pinned to its code threshold: snr(params) == min_snr(code)."""

    params: LinkParams
    code: CodeSpec
    t_total_nominal: float
    headroom_factor: float = 1.0

    def __post_init__(self):
        if self.headroom_factor < 1.0:
            raise ValueError(f"headroom factor must be >= 1, got {self.headroom_factor}")
        gap = abs(snr(self.params) - min_snr(self.code))
        if gap > 1e-10:
            raise ValueError(f"operating point not pinned to code threshold (gap {gap})")

    @property
    def budget(self) -> InfoBudget:
        return info_budget(self.params, self.code.beta, b_override=2.0 * self.code.rate)


@dataclass(frozen=True)
class StrategyResult:
    """InfoBudget of one strategy at one channel condition."""

    strategy: Strategy
    params: LinkParams
    budget: InfoBudget
    xi_art: float


def evaluate_strategy(
    strategy: Strategy, p: LinkParams, code: CodeSpec
) -> StrategyResult:
    """Evaluate one strategy at channel condition p (xi_art must be unset).

    Unmatched and ArtificialNoise require snr(p) >= min_snr(code) (within
    SNR_PRECONDITION_TOL): below threshold the fixed-rate code cannot hold its
    frame error rate, so BelowThresholdError is raised.  ExternalBaseline is
    evaluated only at an exactly matching supplied point, never interpolated.
    """
    if p.xi_art != 0.0:
        raise ValueError("strategy evaluation owns xi_art; pass params with xi_art = 0")
    threshold = min_snr(code)
    kind = strategy.kind

    if kind is StrategyKind.IDEAL_RATE:
        return StrategyResult(strategy, p, info_budget(p, code.beta), 0.0)

    if kind is StrategyKind.UNMATCHED:
        if snr(p) < threshold - SNR_PRECONDITION_TOL:
            raise BelowThresholdError(
                f"snr {snr(p)} below code threshold {threshold}: unmatched code cannot decode"
            )
        budget = info_budget(p, code.beta, b_override=2.0 * code.rate)
        return StrategyResult(strategy, p, budget, 0.0)

    if kind is StrategyKind.ARTIFICIAL_NOISE:
        if snr(p) < threshold - SNR_PRECONDITION_TOL:
            raise BelowThresholdError(
                f"snr {snr(p)} below code threshold {threshold}: no noise to remove"
            )
        xi_art = max(required_artificial_noise(p, code), 0.0)
        pinned = p.with_xi_art(xi_art)
        budget = info_budget(pinned, code.beta, b_override=2.0 * code.rate)
        return StrategyResult(strategy, pinned, budget, xi_art)

    # external baseline: locate the supplied point for this channel condition
    t_total = p.t_total
    for pt in strategy.baseline_points:
        if abs(pt.t_total - t_total) <= 1e-9 * max(1.0, t_total):
            i_ab = mutual_information_ab(pt.snr)
            b = pt.beta_eff * i_ab
            chi = holevo_bound(p)
            budget = InfoBudget(snr=pt.snr, i_ab=i_ab, b=b, chi=chi, r=b - chi)
            return StrategyResult(strategy, p, budget, 0.0)
    raise ValueError(f"no baseline point supplied at t_total = {t_total}")


def _ideal_r(v_mod: float, t_ch: float, xi_ch: float, t_rec: float, xi_rec: float, beta: float) -> float:
    p = LinkParams(v_mod=v_mod, t_ch=t_ch, xi_ch=xi_ch, t_rec=t_rec, xi_rec=xi_rec)
    return beta * mutual_information_ab(snr(p)) - holevo_bound(p)


_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _best_v_mod(
    t_ch: float,
    xi_ch: float,
    t_rec: float,
    xi_rec: float,
    beta: float,
    v_lo: float,
    v_hi: float,
    grid_points: int,
    rel_tol: float,
) -> tuple[float, bool]:
    """Arg-max over v_mod of the arbitrary-rate secret fraction at fixed t_ch.

    Logarithmic grid scan (guards against multimodality) followed by
    golden-section refinement of the winning bracket; ties break toward
    smaller v_mod.  Returns (v_best, hit_edge); hit_edge means the grid
    maximum sat on a boundary and the refinement could not bracket it.
    """

    def f(v: float) -> float:
        return _ideal_r(v, t_ch, xi_ch, t_rec, xi_rec, beta)

    grid = np.geomspace(v_lo, v_hi, grid_points)
    vals = np.array([f(v) for v in grid])
    k = int(np.argmax(vals))  # first max: ties toward smaller v_mod
    if k == 0 or k == grid_points - 1:
        return float(grid[k]), True

    # golden section on log(v) over the bracketing interval
    a, c = math.log(grid[k - 1]), math.log(grid[k + 1])
    x1 = c - _INV_GOLDEN * (c - a)
    x2 = a + _INV_GOLDEN * (c - a)
    f1, f2 = f(math.exp(x1)), f(math.exp(x2))
    while (c - a) > rel_tol:
        if f1 >= f2:  # >= keeps ties on the small-v side
            c, x2, f2 = x2, x1, f1
            x1 = c - _INV_GOLDEN * (c - a)
            f1 = f(math.exp(x1))
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_GOLDEN * (c - a)
            f2 = f(math.exp(x2))
    return math.exp(0.5 * (a + c)), False


def optimize_operating_point(
    xi_ch: float,
    t_rec: float,
    xi_rec: float,
    code: CodeSpec,
    *,
    grid_points: int = 256,
    v_max: float = 1e3,
    golden_rel_tol: float = 1e-8,
    bisect_iters: int = 40,
) -> OperatingPoint:
    """Find the design operating point: threshold SNR with optimal v_mod.

    The threshold constraint ties v_mod and t_ch together,
    v_mod * t_ch = min_snr(code) * (2 + xi_ch + xi_rec) / t_rec, so the search
    is one-dimensional.  The point returned is the self-consistent one where
    v_mod is also the arg-max of the secret fraction for its own channel: at
    any fixed t_ch the arbitrary-rate secret fraction has an interior maximum
    over v_mod, and the SNR at that maximum grows with t_ch, so the
    transmittance at which it equals the code threshold is unique and is
    located by bisection.  A design point with less (more) transmittance than
    this would over- (under-) modulate relative to its own channel optimum.

    Deterministic for fixed inputs.  Raises InfeasibleError when even t_ch = 1
    cannot reach the threshold within the v_mod search ceiling, and
    OptimizationError when the modulation scan finds no interior maximum at
    the solution.
    """
    if xi_ch < 0 or xi_rec < 0:
        raise ValueError("noise terms must be >= 0")
    if not 0.0 < t_rec <= 1.0:
        raise ValueError(f"t_rec must lie in (0, 1], got {t_rec}")
    threshold = min_snr(code)
    # v_mod * t_ch along the threshold constraint; also the v_mod floor (t_ch <= 1)
    pin = threshold * (2.0 + xi_ch + xi_rec) / t_rec
    if not np.isfinite(pin) or pin > v_max:
        raise InfeasibleError(
            f"threshold SNR {threshold} needs v_mod >= {pin} at t_ch = 1, above the {v_max} ceiling"
        )

    def best_v(t_ch: float, tol: float) -> tuple[float, bool]:
        return _best_v_mod(t_ch, xi_ch, t_rec, xi_rec, code.beta, pin, v_max, grid_points, tol)

    def gap(t_ch: float) -> float:
        v_star, _ = best_v(t_ch, 1e-6)  # coarse refinement is enough for the root sign
        p = LinkParams(v_mod=v_star, t_ch=t_ch, xi_ch=xi_ch, t_rec=t_rec, xi_rec=xi_rec)
        return snr(p) - threshold

    t_hi = 1.0
    gap_hi = gap(t_hi)
    if gap_hi < 0.0:
        raise InfeasibleError(
            f"optimal modulation at t_ch = 1 reaches snr {gap_hi + threshold}, "
            f"below the code threshold {threshold}"
        )
    t_lo = 1e-4
    while gap(t_lo) > 0.0:
        t_lo /= 10.0
        if t_lo < 1e-12:
            raise OptimizationError("could not bracket the threshold crossing in t_ch")

    for _ in range(bisect_iters):
        t_mid = 0.5 * (t_lo + t_hi)
        if gap(t_mid) < 0.0:
            t_lo = t_mid
        else:
            t_hi = t_mid
    t_star = 0.5 * (t_lo + t_hi)

    _, hit_edge = best_v(t_star, golden_rel_tol)
    if hit_edge:
        raise OptimizationError(
            f"modulation-variance scan found no interior maximum at t_ch = {t_star}"
        )
    v_star = pin / t_star  # exact threshold pinning
    params = LinkParams(v_mod=v_star, t_ch=t_star, xi_ch=xi_ch, t_rec=t_rec, xi_rec=xi_rec)
    return OperatingPoint(params=params, code=code, t_total_nominal=t_star * t_rec)


def headroom_operating_point(base: OperatingPoint, headroom_factor: float) -> OperatingPoint:
    """Scale v_mod by the headroom factor and re-pin the SNR with xi_art.

    For a matched base point the new baseline noise is
    xi_art = (headroom_factor - 1) * (2 + xi_ch + xi_rec) > 0, which later
    transmittance drops can be absorbed into.
    """
    if headroom_factor < 1.0:
        raise ValueError(f"headroom factor must be >= 1, got {headroom_factor}")
    boosted = replace(base.params, v_mod=headroom_factor * base.params.v_mod, xi_art=0.0)
    xi_art = max(required_artificial_noise(boosted, base.code), 0.0)
    return OperatingPoint(
        params=boosted.with_xi_art(xi_art),
        code=base.code,
        t_total_nominal=base.t_total_nominal,
        headroom_factor=base.headroom_factor * headroom_factor,
    )


def rematch_after_transmittance_change(op: OperatingPoint, t_ch_new: float) -> LinkParams:
    """Re-pin the SNR at a new channel transmittance by adjusting xi_art.

    Raises BelowThresholdError when the drop exceeds what the operating
    point's headroom can absorb (required xi_art < 0).
    """
    probe = replace(op.params, t_ch=t_ch_new, xi_art=0.0)
    xi_art = required_artificial_noise(probe, op.code)
    if xi_art < -XI_ART_SNAP:
        raise BelowThresholdError(
            f"t_ch = {t_ch_new} needs xi_art = {xi_art} < 0: below code threshold"
        )
    return probe.with_xi_art(max(xi_art, 0.0))


@dataclass(frozen=True)
class SweepRow:
    """One (t_ch, strategy) evaluation; flagged rows carry no budget numbers."""

    t_ch: float
    t_total: float
    strategy: str
    v_mod: float
    xi_art: float | None
    snr: float | None
    i_ab: float | None
    b: float | None
    chi: float | None
    r: float | None
    status: str


CSV_COLUMNS = ("t_ch", "t_total", "strategy", "v_mod", "xi_art", "snr", "i_ab", "b", "chi", "r", "status")


@dataclass(frozen=True)
class SweepTable:
    rows: tuple[SweepRow, ...] = field(default_factory=tuple)

    def write_csv(self, fileobj: TextIO) -> None:
        fileobj.write(",".join(CSV_COLUMNS) + "\n")
        for row in self.rows:
            cells = []
            for col in CSV_COLUMNS:
                value = getattr(row, col)
                if value is None:
                    cells.append("")
                elif isinstance(value, str):
                    cells.append(value)
                else:
                    cells.append(format(value, ".12g"))
            fileobj.write(",".join(cells) + "\n")

    def to_csv(self) -> str:
        import io

        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def _ok_row(t_rec: float, result: StrategyResult) -> SweepRow:
    p, budget = result.params, result.budget
    return SweepRow(
        t_ch=p.t_ch,
        t_total=p.t_ch * t_rec,
        strategy=result.strategy.name,
        v_mod=p.v_mod,
        xi_art=result.xi_art,
        snr=budget.snr,
        i_ab=budget.i_ab,
        b=budget.b,
        chi=budget.chi,
        r=budget.r,
        status="ok",
    )


def _flagged_row(t_ch: float, t_rec: float, strategy: Strategy, v_mod: float, status: str,
                 snr_value: float | None) -> SweepRow:
    return SweepRow(
        t_ch=t_ch,
        t_total=t_ch * t_rec,
        strategy=strategy.name,
        v_mod=v_mod,
        xi_art=None,
        snr=snr_value,
        i_ab=None,
        b=None,
        chi=None,
        r=None,
        status=status,
    )


def sweep_transmittance(
    op: OperatingPoint, t_ch_grid: Sequence[float], strategies: Sequence[Strategy]
) -> SweepTable:
    """Evaluate strategies across a transmittance grid into a SweepTable.

    Internal strategies run at every grid value with the operating point's
    v_mod; external baselines run only at their own supplied points.  Rows
    whose strategy precondition fails are flagged (below_threshold) instead of
    aborting the sweep; parameter-domain failures are flagged infeasible.
    Row order is ascending t_ch with a fixed strategy order inside each t_ch,
    independent of evaluation order.
    """
    for t in t_ch_grid:
        if not 0.0 < t <= 1.0:
            raise ValueError(f"sweep grid values must lie in (0, 1], got {t}")
    t_rec = op.params.t_rec
    v_mod = op.params.v_mod
    rows: list[SweepRow] = []

    for strategy in strategies:
        if strategy.kind is StrategyKind.EXTERNAL_BASELINE:
            t_values = [pt.t_total / t_rec for pt in strategy.baseline_points]
        else:
            t_values = list(t_ch_grid)
        for t in t_values:
            try:
                base = replace(op.params, t_ch=t, xi_art=0.0)
            except ValueError:
                rows.append(_flagged_row(t, t_rec, strategy, v_mod, "infeasible", None))
                continue
            try:
                rows.append(_ok_row(t_rec, evaluate_strategy(strategy, base, op.code)))
            except BelowThresholdError:
                rows.append(_flagged_row(t, t_rec, strategy, v_mod, "below_threshold", snr(base)))

    rows.sort(key=lambda row: (row.t_ch, _STRATEGY_ORDER[StrategyKind(row.strategy)]))
    return SweepTable(tuple(rows))
