"""Pattern mining: frequent itemsets, significance testing, assembly.

The pipeline discretizes the matrix into interval items, mines frequent
itemsets (1 to max_depth items, one per feature) with FP-growth, scores
each itemset with a one-sided test against the outside counties, adjusts
p-values with Benjamini-Hochberg, drops candidates dominated by a strict
subset of their constraints, and packages the survivors in rank order.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from collections import Counter
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from . import stats
from .dataset import DataMatrix, fingerprint
from .discretizer import ItemUniverse, build_base_bins, build_item_universe
from .errors import CandidateRejected, MiningError
from .patternstore import PatternSet

log = logging.getLogger(__name__)

MAX_DEPTH_LIMIT = 3


@dataclass(frozen=True)
class MiningConfig:
    min_support: int = 20
    alpha: float = 0.01
    max_depth: int = 3
    bins_per_feature: int = 3
    max_merge_run: int = 2
    direction: str = "high"

    def __post_init__(self):
        if self.min_support < 2:
            raise MiningError("min_support must be at least 2")
        if not 0.0 < self.alpha < 1.0:
            raise MiningError("alpha must lie strictly between 0 and 1")
        if not 1 <= self.max_depth <= MAX_DEPTH_LIMIT:
            raise MiningError(f"max_depth must be in [1, {MAX_DEPTH_LIMIT}]")
        if self.bins_per_feature < 2:
            raise MiningError("bins_per_feature must be at least 2")
        if self.max_merge_run < 1:
            raise MiningError("max_merge_run must be at least 1")
        if self.direction not in ("high", "low", "both"):
            raise MiningError("direction must be one of high, low, both")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Constraint:
    feature: str
    lo: float
    hi: float


@dataclass(frozen=True)
class Pattern:
    pattern_id: str
    constraints: tuple[Constraint, ...]
    members: tuple[str, ...]
    mean_target: float
    p_value: float
    p_adjusted: float
    direction: str
    contributions: tuple[float, ...]


def pattern_id(constraints: Sequence[Constraint]) -> str:
    """Stable id: SHA-256 over the canonical constraint list, first 16 hex."""
    canonical = sorted(
        (c.feature, repr(float(c.lo)), repr(float(c.hi))) for c in constraints
    )
    payload = json.dumps(canonical, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class FrequentItemset:
    item_ids: tuple[int, ...]
    support: int


class _FPNode:
    __slots__ = ("item", "count", "parent", "children")

    def __init__(self, item, parent):
        self.item = item
        self.count = 0
        self.parent = parent
        self.children: dict = {}


def fp_growth(
    transactions: Sequence[Sequence[int]],
    min_support: int,
    max_depth: int,
    item_feature: Mapping[int, int] | Sequence[int] | None = None,
) -> list[FrequentItemset]:
    """Frequent itemsets of size 1..max_depth over the transactions.

    The data is scanned exactly twice: once for item counts, once to build
    the FP-tree. Itemsets then come from each item's conditional pattern
    base (paths above its tree nodes). With item_feature given, itemsets
    holding two items of the same feature are never produced. Since
    max_depth is capped at 3, triple supports are read off a weighted
    co-occurrence matrix of each conditional base instead of recursing
    into conditional trees.
    """
    if min_support < 1:
        raise MiningError("min_support must be positive")
    if not 1 <= max_depth <= MAX_DEPTH_LIMIT:
        raise MiningError(f"max_depth must be in [1, {MAX_DEPTH_LIMIT}]")

    counts: Counter = Counter()
    for t in transactions:  # scan 1
        counts.update(set(t))
    order = sorted(
        (i for i, c in counts.items() if c >= min_support),
        key=lambda i: (-counts[i], i),
    )
    rank = {i: r for r, i in enumerate(order)}
    out = [FrequentItemset((i,), counts[i]) for i in order]
    if max_depth == 1 or not order:
        return sorted(out, key=lambda s: (len(s.item_ids), s.item_ids))

    root = _FPNode(None, None)
    headers: dict = {i: [] for i in order}
    for t in transactions:  # scan 2
        path = sorted((i for i in set(t) if i in rank), key=rank.__getitem__)
        node = root
        for item in path:
            child = node.children.get(item)
            if child is None:
                child = _FPNode(item, node)
                node.children[item] = child
                headers[item].append(child)
            child.count += 1
            node = child

    def feature_of(item):
        return item_feature[item] if item_feature is not None else None

    for x in order:
        base_rows: list[tuple[list, int]] = []
        for node in headers[x]:
            path = []
            up = node.parent
            while up.item is not None:
                path.append(up.item)
                up = up.parent
            if path:
                base_rows.append((path, node.count))
        if not base_rows:
            continue
        conditional: Counter = Counter()
        for path, weight in base_rows:
            for item in path:
                conditional[item] += weight
        x_feature = feature_of(x)
        keep = sorted(
            item
            for item, c in conditional.items()
            if c >= min_support
            and (item_feature is None or feature_of(item) != x_feature)
        )
        for y in keep:
            out.append(FrequentItemset(tuple(sorted((y, x))), conditional[y]))
        if max_depth < 3 or len(keep) < 2:
            continue
        column = {item: c for c, item in enumerate(keep)}
        incidence = np.zeros((len(base_rows), len(keep)))
        weights = np.empty(len(base_rows))
        for r, (path, weight) in enumerate(base_rows):
            weights[r] = weight
            for item in path:
                c = column.get(item)
                if c is not None:
                    incidence[r, c] = 1.0
        pair_counts = (incidence * weights[:, None]).T @ incidence
        ia, ib = np.triu_indices(len(keep), k=1)
        support = pair_counts[ia, ib]
        admissible = support >= min_support
        if item_feature is not None:
            features = np.array([feature_of(item) for item in keep])
            admissible &= features[ia] != features[ib]
        for a, b, s in zip(ia[admissible], ib[admissible], support[admissible]):
            out.append(
                FrequentItemset(tuple(sorted((keep[a], keep[b], x))), int(round(s)))
            )
    return sorted(out, key=lambda s: (len(s.item_ids), s.item_ids))


class _TargetTest:
    """Shared state for scoring many candidate member sets cheaply.

    For a numeric target the pooled sample of every test is the full set
    of counties with an observed target, so global midranks and the tie
    term are computed once; each candidate then costs one masked sum. A
    0/1 target switches to the chi-square independence test.
    """

    REJECT_MEMBERS = "insufficient_members"
    REJECT_OUTSIDE = "insufficient_outside"
    REJECT_DEGENERATE = "degenerate_target"

    def __init__(self, matrix: DataMatrix, direction: str, min_members: int = 2):
        if direction not in ("high", "low"):
            raise MiningError("test direction must be high or low")
        self.direction = direction
        self.min_members = max(2, min_members)
        self.target = matrix.target
        self.valid = ~np.isnan(self.target)
        observed = self.target[self.valid]
        if observed.size == 0:
            raise MiningError("target has no observed values")
        self.n_valid = int(observed.size)
        self.global_mean = float(observed.mean())
        self.binary = bool(np.isin(observed, (0.0, 1.0)).all()) and np.unique(
            observed
        ).size > 1
        self.constant = bool(np.unique(observed).size == 1)
        if not self.binary and not self.constant:
            self.rank_of = np.zeros(self.target.size)
            self.rank_of[self.valid] = stats.midranks(observed)
            self.tie_sum = stats.tie_term(observed)

    def score(self, constraint_mask: np.ndarray) -> tuple:
        """(members_mask, n_inside, mean, p, log_p) or CandidateRejected."""
        members = constraint_mask & self.valid
        n = int(members.sum())
        m = self.n_valid - n
        if n < self.min_members:
            raise CandidateRejected(self.REJECT_MEMBERS)
        if m < 2:
            raise CandidateRejected(self.REJECT_OUTSIDE)
        if self.constant:
            raise CandidateRejected(self.REJECT_DEGENERATE)
        mean = float(self.target[members].mean())
        if self.binary:
            p, log_p = self._binary_test(members, n, m)
        else:
            p, log_p = self._rank_test(members, n, m)
        return members, n, mean, p, log_p

    def _rank_test(self, members: np.ndarray, n: int, m: int) -> tuple[float, float]:
        total = self.n_valid
        u = float(self.rank_of[members].sum() - n * (n + 1) / 2.0)
        if self.direction == "low":
            u = n * m - u  # equivalent to testing the outside as greater
        if n <= stats.EXACT_LIMIT and m <= stats.EXACT_LIMIT:
            inside = self.target[members]
            outside = self.target[self.valid & ~members]
            if self.direction == "low":
                inside, outside = outside, inside
            result = stats.mann_whitney(inside, outside)
            if result.degenerate:
                raise CandidateRejected(self.REJECT_DEGENERATE)
            return result.p_one_sided, math.log(result.p_one_sided)
        variance = (n * m / 12.0) * (
            (total + 1) - self.tie_sum / (total * (total - 1))
        )
        if variance <= 0.0:
            raise CandidateRejected(self.REJECT_DEGENERATE)
        deviate = (u - 0.5 - n * m / 2.0) / math.sqrt(variance)
        return stats.normal_sf(deviate), stats.normal_log_sf(deviate)

    def _binary_test(self, members: np.ndarray, n: int, m: int) -> tuple[float, float]:
        inside_ones = float(self.target[members].sum())
        outside_ones = float(self.target[self.valid].sum() - inside_ones)
        table = [
            [inside_ones, n - inside_ones],
            [outside_ones, m - outside_ones],
        ]
        try:
            result = stats.chi_square_independence(table)
        except stats.StatsError:
            raise CandidateRejected(self.REJECT_DEGENERATE) from None
        # df=1 identity keeps the log finite when sf underflows
        log_p = math.log(2.0) + stats.normal_log_sf(math.sqrt(result.statistic))
        return result.p, log_p


@dataclass(frozen=True)
class PatternCandidate:
    """A scored itemset before multiple-testing adjustment."""

    constraints: tuple[Constraint, ...]
    members: tuple[str, ...]
    mean_target: float
    p_value: float
    direction: str
    n_inside: int
    n_outside: int


def _itemset_constraints(
    item_ids: Sequence[int], matrix: DataMatrix, universe: ItemUniverse
) -> tuple[Constraint, ...]:
    intervals = [universe.items[i] for i in item_ids]
    intervals.sort(key=lambda iv: iv.feature_id)
    return tuple(
        Constraint(matrix.features[iv.feature_id].name, iv.lo, iv.hi)
        for iv in intervals
    )


def _itemset_mask(item_ids: Sequence[int], universe: ItemUniverse) -> np.ndarray:
    mask = universe.masks[item_ids[0]].copy()
    for i in item_ids[1:]:
        mask &= universe.masks[i]
    return mask


def evaluate_pattern(
    itemset: FrequentItemset,
    matrix: DataMatrix,
    universe: ItemUniverse,
    direction: str = "high",
) -> PatternCandidate:
    """Score one frequent itemset against the rest of the counties.

    Raises CandidateRejected (with a reason code) when fewer than two
    inside or outside counties have an observed target, or the target is
    constant.
    """
    test = _TargetTest(matrix, direction, min_members=2)
    mask = _itemset_mask(itemset.item_ids, universe)
    members, n, mean, p, _ = test.score(mask)
    return PatternCandidate(
        constraints=_itemset_constraints(itemset.item_ids, matrix, universe),
        members=tuple(matrix.counties[i].fips for i in np.flatnonzero(members)),
        mean_target=mean,
        p_value=p,
        direction=direction,
        n_inside=n,
        n_outside=test.n_valid - n,
    )


def _constraint_mask(
    constraints: Sequence[Constraint], matrix: DataMatrix
) -> np.ndarray:
    mask = np.ones(matrix.n_counties, dtype=bool)
    for c in constraints:
        column = matrix.values[:, matrix.feature_index[c.feature]]
        mask &= (column >= c.lo) & (column <= c.hi)
    return mask


def _leave_one_out_weights(
    constraints: Sequence[Constraint],
    matrix: DataMatrix,
    test: _TargetTest,
    log_p_full: float,
) -> list[float]:
    """Raw contribution of each constraint: the log-p lost by dropping it."""
    raw = []
    for omit in range(len(constraints)):
        relaxed = [c for k, c in enumerate(constraints) if k != omit]
        try:
            _, _, _, _, log_p = test.score(_constraint_mask(relaxed, matrix))
        except CandidateRejected:
            # untestable without this constraint: it carries the pattern
            log_p = 0.0
        raw.append(max(0.0, log_p - log_p_full))
    return raw


def _normalize_weights(raw: Sequence[float]) -> tuple[float, ...]:
    total = sum(raw)
    if total <= 0.0:
        return tuple(1.0 / len(raw) for _ in raw)
    return tuple(r / total for r in raw)


def contribution_scores(
    constraints: Sequence[Constraint], matrix: DataMatrix, direction: str = "high"
) -> list[float]:
    """Per-constraint importance weights (non-negative, summing to 1).

    A constraint's weight reflects how much the pattern's log p-value
    deteriorates when that constraint is removed and membership recomputed
    from raw values. Single-constraint patterns get [1.0].
    """
    if len(constraints) == 0:
        raise MiningError("a pattern needs at least one constraint")
    if len(constraints) == 1:
        return [1.0]
    test = _TargetTest(matrix, direction, min_members=2)
    _, _, _, _, log_p_full = test.score(_constraint_mask(constraints, matrix))
    raw = _leave_one_out_weights(constraints, matrix, test, log_p_full)
    return list(_normalize_weights(raw))


def _dominates(sub_adj, sub_mean, adj, mean, direction: str) -> bool:
    if sub_adj > adj:
        return False
    return sub_mean >= mean if direction == "high" else sub_mean <= mean


def _prune_redundant(selected: list[dict], direction: str) -> list[dict]:
    """Drop any pattern dominated by a strict subset of its constraints.

    Domination: the subset pattern was itself selected, its adjusted p is
    no worse, and its mean is at least as extreme in the pattern direction.
    """
    by_key = {
        frozenset((c.feature, c.lo, c.hi) for c in cand["constraints"]): cand
        for cand in selected
    }
    survivors = []
    for cand in selected:
        key = sorted((c.feature, c.lo, c.hi) for c in cand["constraints"])
        dominated = False
        for r in range(1, len(key)):
            for subset in combinations(key, r):
                sub = by_key.get(frozenset(subset))
                if sub is not None and _dominates(
                    sub["p_adjusted"],
                    sub["mean_target"],
                    cand["p_adjusted"],
                    cand["mean_target"],
                    direction,
                ):
                    dominated = True
                    break
            if dominated:
                break
        if not dominated:
            survivors.append(cand)
    return survivors


def mine(matrix: DataMatrix, config: MiningConfig = MiningConfig()) -> PatternSet:
    """Run the full mining pipeline and return patterns in rank order.

    Rank order is mean target descending for direction "high" (ascending
    for "low", and the high block before the low block for "both"), with
    pattern id breaking ties.
    """
    if matrix.n_counties < config.min_support:
        raise MiningError(
            f"matrix has {matrix.n_counties} counties, fewer than min_support="
            f"{config.min_support}"
        )
    bins = build_base_bins(matrix, config.bins_per_feature)
    universe = build_item_universe(matrix, bins, config.max_merge_run)
    itemsets = fp_growth(
        universe.transactions, config.min_support, config.max_depth, universe.feature_of
    )
    log.info("%d frequent itemsets from %d items", len(itemsets), len(universe.items))

    directions = ("high", "low") if config.direction == "both" else (config.direction,)
    all_patterns: list[Pattern] = []
    for direction in directions:
        test = _TargetTest(matrix, direction, min_members=config.min_support)
        candidates = []
        rejections: Counter = Counter()
        for itemset in itemsets:
            mask = _itemset_mask(itemset.item_ids, universe)
            try:
                members, n, mean, p, log_p = test.score(mask)
            except CandidateRejected as rej:
                rejections[rej.reason] += 1
                continue
            candidates.append(
                {
                    "item_ids": itemset.item_ids,
                    "constraints": _itemset_constraints(
                        itemset.item_ids, matrix, universe
                    ),
                    "members": members,
                    "mean_target": mean,
                    "p_value": p,
                    "log_p": log_p,
                }
            )
        if rejections:
            log.info(
                "rejected candidates (%s): %s",
                direction,
                dict(sorted(rejections.items())),
            )
        adjusted = stats.bh_adjust([c["p_value"] for c in candidates])
        selected = []
        for cand, adj in zip(candidates, adjusted):
            if adj > config.alpha:
                continue
            if direction == "high" and not cand["mean_target"] > test.global_mean:
                continue
            if direction == "low" and not cand["mean_target"] < test.global_mean:
                continue
            cand["p_adjusted"] = adj
            selected.append(cand)
        survivors = _prune_redundant(selected, direction)
        log.info(
            "%s direction: %d tested, %d significant, %d after redundancy pruning",
            direction,
            len(candidates),
            len(selected),
            len(survivors),
        )
        block = []
        for cand in survivors:
            constraints = cand["constraints"]
            if len(constraints) == 1:
                weights: tuple[float, ...] = (1.0,)
            else:
                weights = _normalize_weights(
                    _leave_one_out_weights(constraints, matrix, test, cand["log_p"])
                )
            block.append(
                Pattern(
                    pattern_id=pattern_id(constraints),
                    constraints=constraints,
                    members=tuple(
                        matrix.counties[i].fips for i in np.flatnonzero(cand["members"])
                    ),
                    mean_target=cand["mean_target"],
                    p_value=cand["p_value"],
                    p_adjusted=cand["p_adjusted"],
                    direction=direction,
                    contributions=weights,
                )
            )
        sign = -1.0 if direction == "high" else 1.0
        block.sort(key=lambda p: (sign * p.mean_target, p.pattern_id))
        all_patterns.extend(block)

    return PatternSet(
        patterns=tuple(all_patterns),
        global_target_mean=matrix.global_target_mean,
        config=config,
        created_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        dataset_fingerprint=fingerprint(matrix),
    )
