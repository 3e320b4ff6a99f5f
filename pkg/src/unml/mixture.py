"""Complete-data mixture code lengths, hard-assignment clustering, K selection.

The selection criterion for K clusters is the complete-data code length: the
negative log of the maximized joint likelihood of data and labels, plus the
log of a normalization constant that sums the per-assignment normalization
bounds over every way of splitting n points into K clusters.  Because the
label sequence is explicit, clustering is hard-assignment (classification EM):
each point goes to the cluster that minimizes its contribution to the
complete-data term, and per-cluster MLEs are refit until the term stops
improving.

Scale conversion of the data shifts the complete-data term of every assignment
by the same amount, so differences between candidate models, and therefore the
selected K, do not depend on the scale at which the data is encoded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp, xlogy

from .errors import (
    InfeasibleKError,
    InvalidAssignmentError,
    InvalidInputError,
    SingularCovarianceError,
)
from .gaussian import gaussian_data_term, log_norm_bound
from .stats import Dataset, DomainSpec, compute_mle

_LOG_2PI = math.log(2.0 * math.pi)
_CONVERGENCE_TOL = 1e-9
_MAX_ROUNDS = 500
_MAX_REPAIRS = 10


@dataclass(frozen=True, eq=False)
class Assignment:
    """A hard assignment of n observations to k clusters.

    Labels take values in 1..k.  ``counts[i]`` is the size of cluster i + 1.
    Serializes as a plain integer array.
    """

    labels: np.ndarray
    k: int
    counts: np.ndarray = None

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=int)
        if labels.ndim != 1 or labels.size < 1:
            raise InvalidAssignmentError("labels must be a non-empty 1-D integer sequence")
        k = int(self.k)
        if k < 1:
            raise InvalidAssignmentError(f"k must be >= 1, got {k}")
        if labels.min() < 1 or labels.max() > k:
            raise InvalidAssignmentError(f"labels must lie in 1..{k}")
        counts = np.bincount(labels - 1, minlength=k)
        if self.counts is not None:
            given = np.asarray(self.counts, dtype=int)
            if given.shape != (k,) or np.any(given != counts):
                raise InvalidAssignmentError("counts inconsistent with labels")
        labels = labels.copy()
        labels.setflags(write=False)
        counts.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return self.labels.shape[0]


@dataclass(frozen=True, eq=False)
class KEntry:
    """Per-K evaluation: the two code-length terms and the assignment used."""

    k: int
    data_term: float
    log_norm: float
    total: float
    assignment: Assignment


@dataclass(frozen=True)
class SkippedK:
    k: int
    reason: str


@dataclass(frozen=True, eq=False)
class ModelSelectionReport:
    """Outcome of K selection: per-K entries, the argmin, and run parameters."""

    entries: tuple[KEntry, ...]
    skipped: tuple[SkippedK, ...]
    selected_k: int
    alpha: float
    seed: int
    restarts: int
    spec: DomainSpec


def complete_data_term(data: Dataset, z: Assignment) -> float:
    """Negative log of the maximized complete-data likelihood, in nats.

    Expands to  sum_k [ -h_k log(h_k / n) + (m h_k / 2) log(2 pi e)
    + (h_k / 2) sum_j log lam_j^(k) ]  over the non-empty clusters.  Every
    non-empty cluster needs at least m + 1 points for its MLE to exist and a
    non-singular within-cluster covariance.
    """
    if z.n != data.n:
        raise InvalidAssignmentError(
            f"assignment covers {z.n} observations, dataset has {data.n}")
    n, m = data.n, data.m
    total = 0.0
    for k in range(z.k):
        h = int(z.counts[k])
        if h == 0:
            continue
        if h < m + 1:
            raise InvalidAssignmentError(
                f"cluster {k + 1} has {h} points; non-empty clusters need >= {m + 1}")
        members = Dataset(data.rows[z.labels == k + 1])
        mle = compute_mle(members)
        if np.any(mle.eigenvalues <= 0.0):
            raise SingularCovarianceError(f"cluster {k + 1} has singular covariance")
        total += -h * math.log(h / n) + gaussian_data_term(mle, h)
    return total


def codelength_difference(data: Dataset, z1: Assignment, z2: Assignment) -> float:
    """Difference of complete-data terms between two assignments.

    Invariant under scaling of the data: the scale contribution is
    n * m * log(alpha) for every assignment, so it cancels.
    """
    return complete_data_term(data, z1) - complete_data_term(data, z2)


def _log_cluster_terms(n: int, spec: DomainSpec) -> np.ndarray:
    """log of the per-cluster normalization factor for each cluster size 0..n.

    Size 0 contributes a factor 1.  Sizes 1..m are excluded (factor 0): the
    MLE does not exist there, so those assignments carry no normalization
    mass.  Sizes >= m + 1 contribute the single-Gaussian bound.
    """
    m = spec.m
    out = np.full(n + 1, -np.inf)
    out[0] = 0.0
    if n >= m + 1:
        sizes = np.arange(m + 1, n + 1)
        out[m + 1:] = log_norm_bound(sizes, spec)
    return out


def _mixture_norm_table(k_max: int, n: int, spec: DomainSpec) -> np.ndarray:
    """DP table of log normalization constants, rows k = 1..k_max, columns 0..n.

    Row k is the convolution of row k - 1 with the per-cluster terms under
    multinomial weights:

        C_k(n) = sum_{s=0}^{n} binom(n, s) (s/n)^s ((n-s)/n)^(n-s)
                 * C_{k-1}(s) * T(n - s),

    with the 0^0 = 1 convention, base case C_1 = T.  Runs in O(k n^2).
    """
    if k_max < 1 or n < 0:
        raise InvalidInputError(f"need k >= 1 and n >= 0, got k={k_max}, n={n}")
    log_t = _log_cluster_terms(n, spec)
    table = np.empty((k_max + 1, n + 1))
    table[1] = log_t
    for k in range(2, k_max + 1):
        for nn in range(n + 1):
            s = np.arange(nn + 1)
            if nn == 0:
                table[k, 0] = table[k - 1, 0] + log_t[0]
                continue
            lw = (gammaln(nn + 1) - gammaln(s + 1) - gammaln(nn - s + 1)
                  + xlogy(s, s / nn) + xlogy(nn - s, (nn - s) / nn))
            table[k, nn] = logsumexp(lw + table[k - 1, s] + log_t[nn - s])
    return table[1:]


def log_mixture_norm(k: int, n: int, spec: DomainSpec) -> float:
    """log of the mixture normalization constant for k clusters and n points.

    Monotone non-decreasing in k (an empty extra cluster reproduces every
    k - 1 term).  Equals the single-Gaussian bound exactly at k = 1.
    """
    return float(_mixture_norm_table(k, n, spec)[k - 1, n])


def _child_seed(seed: int, *key: int) -> int:
    """Deterministic derived seed for a sub-task."""
    ss = np.random.SeedSequence([int(seed), *[int(x) for x in key]])
    return int(ss.generate_state(1, np.uint64)[0])


def _seeded_center_indices(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    # k-means++ style: seeded index draws weighted by squared distance ratios,
    # which are unchanged when the data is rescaled
    n = x.shape[0]
    idx = [int(rng.integers(n))]
    d2 = ((x - x[idx[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            cand = int(rng.integers(n))
        else:
            cand = int(rng.choice(n, p=d2 / total))
        idx.append(cand)
        d2 = np.minimum(d2, ((x - x[cand]) ** 2).sum(axis=1))
    return np.asarray(idx)


class _ClusterState:
    """Mutable per-cluster MLE state used during the descent."""

    def __init__(self, x: np.ndarray, k: int, m: int):
        self.x = x
        self.k = k
        self.m = m
        self.means = np.zeros((k, m))
        self.eigvals = np.ones((k, m))
        self.bases = np.tile(np.eye(m), (k, 1, 1))
        self.counts = np.zeros(k, dtype=int)

    def refit(self, labels: np.ndarray) -> list[int]:
        """Refit per-cluster MLEs; returns indices of singular clusters."""
        singular = []
        n = self.x.shape[0]
        for k in range(self.k):
            mask = labels == k
            h = int(mask.sum())
            self.counts[k] = h
            if h == 0:
                continue  # keep the previous center for repairs
            mle = compute_mle(Dataset(self.x[mask])) if h >= 2 else None
            if mle is None:
                self.means[k] = self.x[mask][0]
                singular.append(k)
                continue
            self.means[k] = mle.mean
            self.eigvals[k] = mle.eigenvalues
            self.bases[k] = mle.eigenbasis
            if mle.eigenvalues[0] <= 0.0:
                singular.append(k)
        return singular

    def costs(self, n: int) -> np.ndarray:
        """Per-point, per-cluster contribution to the complete-data term."""
        x, m = self.x, self.m
        out = np.empty((x.shape[0], self.k))
        for k in range(self.k):
            proj = (x - self.means[k]) @ self.bases[k]
            mahal = (proj ** 2 / self.eigvals[k]).sum(axis=1)
            out[:, k] = (-math.log(self.counts[k] / n)
                         + 0.5 * float(np.log(self.eigvals[k]).sum())
                         + 0.5 * m * _LOG_2PI + 0.5 * mahal)
        return out

    def objective(self, n: int) -> float:
        val = 0.0
        for k in range(self.k):
            h = int(self.counts[k])
            val += (-h * math.log(h / n) + h * self.m / 2.0 * (_LOG_2PI + 1.0)
                    + h / 2.0 * float(np.log(self.eigvals[k]).sum()))
        return val


def _repair_counts(labels: np.ndarray, state: _ClusterState, min_size: int) -> bool:
    """Top up undersized clusters with the nearest points from the largest one.

    Returns True if any point moved.  Donors never drop below ``min_size``.
    """
    moved = False
    x = state.x
    for k in range(state.k):
        while int((labels == k).sum()) < min_size:
            counts = np.bincount(labels, minlength=state.k)
            donor = int(np.argmax(counts))
            if donor == k or counts[donor] <= min_size:
                viable = [(c, i) for i, c in enumerate(counts) if i != k and c > min_size]
                if not viable:
                    return moved
                donor = max(viable)[1]
            cand = np.nonzero(labels == donor)[0]
            d2 = ((x[cand] - state.means[k]) ** 2).sum(axis=1)
            labels[cand[int(np.argmin(d2))]] = k
            moved = True
    return moved


def cluster(data: Dataset, k: int, spec: DomainSpec, seed: int) -> Assignment:
    """Hard-assignment clustering of the data into exactly k clusters.

    Deterministic given ``(data, k, seed)``.  Initial centers come from seeded
    index draws over the data rows, so rescaled data yields the same initial
    indices; the descent alternates assignment and per-cluster refits and
    stops when the complete-data term improves by less than 1e-9 nats or after
    500 rounds.  Every cluster in the result has at least m + 1 points.

    The domain parameters do not steer the search; the argument is validated
    for dimension so one configuration can be threaded through a whole run.
    """
    n, m = data.n, data.m
    if spec.m != m:
        raise InvalidInputError(f"dimension mismatch: data m={m}, spec m={spec.m}")
    if k < 1:
        raise InvalidInputError(f"k must be >= 1, got {k}")
    min_size = m + 1
    if n < k * min_size:
        raise InfeasibleKError(
            f"k={k} needs at least k*(m+1) = {k * min_size} observations, got {n}")
    if k == 1:
        return Assignment(labels=np.ones(n, dtype=int), k=1)

    x = data.rows
    rng = np.random.default_rng(int(seed))
    state = _ClusterState(x, k, m)
    centers = x[_seeded_center_indices(x, k, rng)]
    d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(d2, axis=1)
    state.means = centers.copy()

    repairs = 0
    best_obj = math.inf
    best_labels = None
    prev_obj = math.inf
    for _ in range(_MAX_ROUNDS):
        _repair_counts(labels, state, min_size)
        singular = state.refit(labels)
        while singular:
            repairs += 1
            if repairs > _MAX_REPAIRS:
                raise SingularCovarianceError(
                    f"cluster {singular[0] + 1} stayed singular after "
                    f"{_MAX_REPAIRS} repair attempts")
            target = singular[0]
            counts = np.bincount(labels, minlength=k)
            donor = int(np.argmax(np.where(np.arange(k) == target, -1, counts)))
            if counts[donor] <= min_size:
                raise SingularCovarianceError(
                    f"cluster {target + 1} is singular and no donor points remain")
            cand = np.nonzero(labels == donor)[0]
            dist = ((x[cand] - state.means[target]) ** 2).sum(axis=1)
            labels[cand[int(np.argmin(dist))]] = target
            singular = state.refit(labels)
        obj = state.objective(n)
        if obj < best_obj:
            best_obj = obj
            best_labels = labels.copy()
        if prev_obj - obj < _CONVERGENCE_TOL:
            break
        prev_obj = obj
        labels = np.argmin(state.costs(n), axis=1)
    return Assignment(labels=best_labels + 1, k=k)


def best_clustering(data: Dataset, k: int, spec: DomainSpec, seed: int,
                    restarts: int = 8) -> Assignment:
    """Best of ``restarts`` seeded clusterings, judged by the complete-data term.

    Restart seeds derive deterministically from the master seed and are
    reduced in fixed order, so the result does not depend on how restarts
    might be scheduled.
    """
    if restarts < 1:
        raise InvalidInputError(f"restarts must be >= 1, got {restarts}")
    best = None
    best_term = math.inf
    for r in range(restarts):
        z = cluster(data, k, spec, _child_seed(seed, k, r))
        term = complete_data_term(data, z)
        if term < best_term:
            best = z
            best_term = term
    return best


def build_report(data: Dataset, picks: list[tuple[int, Assignment]],
                 skipped: list[SkippedK], spec: DomainSpec, seed: int,
                 restarts: int, alpha: float = 1.0) -> ModelSelectionReport:
    """Assemble per-K totals and the argmin from already-chosen assignments.

    Ties in the total break toward smaller K.
    """
    if not picks:
        raise InfeasibleKError("no feasible cluster count was evaluated")
    k_max = max(k for k, _ in picks)
    table = _mixture_norm_table(k_max, data.n, spec)
    entries = []
    for k, z in sorted(picks, key=lambda pick: pick[0]):
        data_term = complete_data_term(data, z)
        log_norm = float(table[k - 1, data.n])
        entries.append(KEntry(k=k, data_term=data_term, log_norm=log_norm,
                              total=data_term + log_norm, assignment=z))
    totals = [e.total for e in entries]
    selected = entries[int(np.argmin(totals))].k
    return ModelSelectionReport(entries=tuple(entries), skipped=tuple(skipped),
                                selected_k=selected, alpha=float(alpha),
                                seed=int(seed), restarts=int(restarts), spec=spec)


def select_k(data: Dataset, k_range, spec: DomainSpec, seed: int,
             restarts: int = 8, alpha: float = 1.0) -> ModelSelectionReport:
    """Select the number of clusters over an iterable of candidate K values.

    Each feasible K gets a best-of-restarts clustering; its total is the
    complete-data term plus the mixture normalization bound.  Infeasible K
    values (n < k (m + 1)) are recorded as skipped.  The data is assumed to
    be scaled into the domain already; ``alpha`` is carried into the report
    for provenance.
    """
    ks = sorted(set(int(k) for k in k_range))
    if not ks:
        raise InvalidInputError("k_range is empty")
    min_size = data.m + 1
    picks: list[tuple[int, Assignment]] = []
    skipped: list[SkippedK] = []
    for k in ks:
        if k < 1:
            raise InvalidInputError(f"k must be >= 1, got {k}")
        if data.n < k * min_size:
            skipped.append(SkippedK(
                k=k, reason=f"needs at least {k * min_size} observations, have {data.n}"))
            continue
        picks.append((k, best_clustering(data, k, spec, seed, restarts)))
    return build_report(data, picks, skipped, spec, seed, restarts, alpha)
