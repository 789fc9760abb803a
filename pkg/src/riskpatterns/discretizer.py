"""Equal-frequency discretization and the item universe for mining.

Each usable feature gets quantile bin edges; items are single bins plus
runs of up to max_merge_run adjacent bins, excluding any run that would
cover the feature's whole observed range. An item's closed interval
[lo, hi] uses the observed min/max of its member counties, so membership
can later be re-derived from raw values alone.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .dataset import DataMatrix
from .errors import DatasetError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FeatureBins:
    feature_id: int
    edges: tuple[float, ...]  # k+1 ascending edges for k bins

    @property
    def n_bins(self) -> int:
        return len(self.edges) - 1

    def assign(self, values: np.ndarray) -> np.ndarray:
        """Bin index per value: [e_i, e_{i+1}), last bin closed; NaN -> -1."""
        inner = np.asarray(self.edges[1:-1])
        out = np.searchsorted(inner, values, side="right").astype(np.int64)
        out[np.isnan(values)] = -1
        return out


@dataclass(frozen=True)
class Interval:
    """An item: one feature constrained to a closed value interval."""

    feature_id: int
    lo: float
    hi: float
    lo_bin: int
    hi_bin: int


@dataclass(frozen=True)
class ItemUniverse:
    items: tuple[Interval, ...]
    feature_of: tuple[int, ...]  # item id -> feature id
    masks: np.ndarray  # (n_items, n_counties) bool membership
    transactions: tuple[tuple[int, ...], ...]  # per county, ascending item ids


def build_base_bins(matrix: DataMatrix, bins_per_feature: int) -> dict[int, FeatureBins]:
    """Quantile bin edges per usable feature.

    Binary features get the fixed edges (0, 0.5, 1). Features with fewer
    than two distinct observed values are skipped with a warning. The bin
    count collapses to the number of distinct values when that is smaller,
    and duplicate quantile edges are merged.
    """
    if bins_per_feature < 2:
        raise DatasetError("bins_per_feature must be at least 2")
    constant = matrix.constant_feature_ids()
    bins: dict[int, FeatureBins] = {}
    for spec in matrix.features:
        j = spec.feature_id
        if j in constant:
            log.warning("skipping constant feature %r", spec.name)
            continue
        if spec.kind == "binary":
            bins[j] = FeatureBins(j, (0.0, 0.5, 1.0))
            continue
        col = matrix.values[:, j]
        observed = col[~np.isnan(col)]
        k = min(bins_per_feature, np.unique(observed).size)
        edges = np.quantile(observed, np.linspace(0.0, 1.0, k + 1))
        deduped: list[float] = []
        for e in edges:
            if not deduped or e > deduped[-1]:
                deduped.append(float(e))
        bins[j] = FeatureBins(j, tuple(deduped))
    return bins


def build_item_universe(
    matrix: DataMatrix, bins: dict[int, FeatureBins], max_merge_run: int
) -> ItemUniverse:
    """Items (single bins and merged runs) plus per-county transactions.

    Items are emitted in feature order, then by (lo_bin, hi_bin); runs that
    span every bin of a feature are skipped, as are empty runs, and runs
    whose observed interval duplicates an earlier item on the same feature.
    """
    if max_merge_run < 1:
        raise DatasetError("max_merge_run must be at least 1")
    items: list[Interval] = []
    masks: list[np.ndarray] = []
    for j in sorted(bins):
        fb = bins[j]
        col = matrix.values[:, j]
        assigned = fb.assign(col)
        k = fb.n_bins
        seen_intervals: set[tuple[float, float]] = set()
        for lo_bin in range(k):
            for hi_bin in range(lo_bin, min(lo_bin + max_merge_run, k)):
                if hi_bin - lo_bin + 1 == k:
                    continue  # would cover the whole observed range
                mask = (assigned >= lo_bin) & (assigned <= hi_bin)
                if not mask.any():
                    continue
                member_values = col[mask]
                lo = float(member_values.min())
                hi = float(member_values.max())
                if (lo, hi) in seen_intervals:
                    continue
                seen_intervals.add((lo, hi))
                items.append(Interval(j, lo, hi, lo_bin, hi_bin))
                masks.append(mask)

    mask_array = (
        np.array(masks) if masks else np.zeros((0, matrix.n_counties), dtype=bool)
    )
    transactions = tuple(
        tuple(np.flatnonzero(mask_array[:, c]).tolist())
        for c in range(matrix.n_counties)
    )
    return ItemUniverse(
        items=tuple(items),
        feature_of=tuple(item.feature_id for item in items),
        masks=mask_array,
        transactions=transactions,
    )
