"""Cross-method concordance: ranking tables, Kendall's W with tie
correction, and pairwise correlation between methods' scaled measures."""

import csv
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2, rankdata

from .errors import ConfigError, InsufficientDataError, StructuralError

# scaled-importance columns are expected to sum to one
COLUMN_SUM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class RankingTable:
    """K parameters x M methods of scaled measures plus their average ranks.

    Ranks run 1 = least important to K = most important (any consistent
    orientation gives the same W); ties receive average ranks.
    """

    params: tuple
    methods: tuple
    scaled: np.ndarray
    ranks: np.ndarray

    @classmethod
    def from_scaled(cls, params, methods, scaled, check_sums=True):
        scaled = np.asarray(scaled, dtype=float)
        if scaled.shape != (len(params), len(methods)):
            raise StructuralError(
                f"scaled matrix {scaled.shape} does not match "
                f"{len(params)} params x {len(methods)} methods")
        if check_sums:
            sums = scaled.sum(axis=0)
            if np.any(np.abs(sums - 1.0) > COLUMN_SUM_TOL):
                raise StructuralError(
                    f"scaled columns must each sum to 1 (got {sums})")
        ranks = np.column_stack([rankdata(scaled[:, j])
                                 for j in range(scaled.shape[1])])
        return cls(tuple(params), tuple(methods), scaled, ranks)

    @classmethod
    def from_results(cls, results):
        """Build from {method name: SensitivityResult} sharing one space."""
        methods = list(results)
        if not methods:
            raise ConfigError("no results to compare")
        names = results[methods[0]].names
        for m in methods:
            if results[m].names != names:
                raise StructuralError(f"method {m} ranks different parameters")
        scaled = np.column_stack([results[m].scaled for m in methods])
        return cls.from_scaled(names, methods, scaled)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["param"] + list(self.methods))
            for i, p in enumerate(self.params):
                writer.writerow([p] + [f"{v:.17g}" for v in self.scaled[i]])

    @classmethod
    def read_csv(cls, path, check_sums=True):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if not header or header[0] != "param":
                raise ConfigError(f"{path}: expected a 'param' header column")
            methods = header[1:]
            params, rows = [], []
            for row in reader:
                if not row:
                    continue
                params.append(row[0])
                rows.append([float(v) for v in row[1:]])
        return cls.from_scaled(params, methods, np.array(rows), check_sums=check_sums)


def kendalls_w(table):
    """Kendall's coefficient of concordance with the standard tie correction.

        W = 12 S / (m^2 (n^3 - n) - m T)

    where S is the sum of squared deviations of the rank sums, and T sums
    (t^3 - t) over every group of t tied items within a method. The chi-square
    approximation m (n - 1) W needs at least three items.

    Returns (w, chi_sq, p_value).
    """
    ranks = table.ranks
    n, m = ranks.shape
    if n < 2:
        raise InsufficientDataError("need at least two items to rank")
    if m < 2:
        raise InsufficientDataError("need at least two methods to compare")
    rank_sums = ranks.sum(axis=1)
    s = float(((rank_sums - rank_sums.mean()) ** 2).sum())
    tie_term = 0.0
    for j in range(m):
        _, counts = np.unique(ranks[:, j], return_counts=True)
        tie_term += float(((counts**3 - counts)[counts > 1]).sum())
    denom = m**2 * (n**3 - n) - m * tie_term
    if denom <= 0:
        # every method ties every item: no information, no concordance
        return 0.0, 0.0, 1.0
    w = 12.0 * s / denom
    chi_sq = m * (n - 1) * w
    p = float(chi2.sf(chi_sq, n - 1)) if n >= 3 else np.nan
    return w, chi_sq, p


def pairwise_correlation(table, method="pearson"):
    """M x M correlation matrix between methods' scaled measures.

    Zero-variance columns make the coefficient undefined; those entries are
    reported as NaN rather than raising.
    """
    x = table.scaled
    m = x.shape[1]
    if m < 2:
        raise InsufficientDataError("need at least two methods to correlate")
    if method == "spearman":
        x = np.column_stack([rankdata(x[:, j]) for j in range(m)])
    elif method != "pearson":
        raise ConfigError(f"unknown correlation method {method!r}")
    out = np.eye(m)
    sd = x.std(axis=0)
    for a in range(m):
        for b in range(a + 1, m):
            if sd[a] == 0 or sd[b] == 0:
                out[a, b] = out[b, a] = np.nan
            else:
                out[a, b] = out[b, a] = float(np.corrcoef(x[:, a], x[:, b])[0, 1])
    return out


def pairwise_pearson(table):
    return pairwise_correlation(table, method="pearson")


def pairwise_spearman(table):
    return pairwise_correlation(table, method="spearman")
