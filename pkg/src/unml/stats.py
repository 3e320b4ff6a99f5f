"""Sufficient statistics, eigendecomposition, restricted-domain membership, scaling.

The restricted domain constrains the maximum-likelihood estimates of a dataset:
the squared norm of the mean must not exceed ``R`` and every eigenvalue of the
covariance must lie inside a per-coordinate interval ``[eps1[j], eps2[j]]`` with
a global cap ``eps2_cap < 1``.  Everything downstream (code lengths, bounds,
model selection) is phrased in terms of these statistics.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import InsufficientDataError, InvalidInputError

_SYMMETRY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Dataset:
    """An immutable n x m matrix of observations, one row per observation.

    A 1-D input is treated as a column of scalar observations (m = 1).
    """

    rows: np.ndarray

    def __post_init__(self):
        arr = np.array(self.rows, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise InvalidInputError(f"rows must be 1- or 2-dimensional, got ndim={arr.ndim}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvalidInputError(f"dataset must be non-empty, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("dataset contains non-finite entries")
        arr.setflags(write=False)
        object.__setattr__(self, "rows", arr)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def m(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True, eq=False)
class GaussianMle:
    """Maximum-likelihood estimates of a Gaussian: mean, covariance, eigensystem.

    The covariance uses the 1/n normalization.  Eigenvalues are ascending and
    non-negative; the eigenbasis is orthonormal with a fixed sign convention
    (largest-magnitude entry of each eigenvector is non-negative) so results
    are deterministic.
    """

    mean: np.ndarray
    covariance: np.ndarray
    eigenvalues: np.ndarray
    eigenbasis: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.covariance, dtype=float)
        vals = np.asarray(self.eigenvalues, dtype=float)
        vecs = np.asarray(self.eigenbasis, dtype=float)
        m = mean.shape[0]
        if cov.shape != (m, m) or vals.shape != (m,) or vecs.shape != (m, m):
            raise InvalidInputError("inconsistent shapes for Gaussian MLE fields")
        if np.any(np.diff(vals) < -1e-12):
            raise InvalidInputError("eigenvalues must be sorted ascending")
        for name, arr in (("mean", mean), ("covariance", cov),
                          ("eigenvalues", vals), ("eigenbasis", vecs)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def m(self) -> int:
        return self.mean.shape[0]


def _log_multigamma(m: int, a: float) -> float:
    # log of the multivariate gamma function; full-featured version lives in
    # the gaussian module, this private copy only serves DomainSpec validation
    return m * (m - 1) / 4.0 * math.log(math.pi) + float(
        sum(gammaln(a + (1 - j) / 2.0) for j in range(1, m + 1))
    )


@dataclass(frozen=True, eq=False)
class DomainSpec:
    """Parameters of the restricted domain.

    ``R`` bounds the squared norm of the mean estimate.  ``eps1`` and ``eps2``
    are per-coordinate lower and upper bounds on the ascending covariance
    eigenvalues, with ``0 < eps1[j] <= eps2[j] <= eps2_cap < 1``.  The cap must
    additionally satisfy the orthogonal-volume constraint
    ``pi^(m^2/2) / Gamma_m(m/2) * eps2_cap^(m(m-1)/2) <= 1``, which is what
    lets the eigenvector integral be bounded away; for m = 1 it is vacuous.
    """

    R: float
    eps1: np.ndarray
    eps2: np.ndarray
    eps2_cap: float

    def __post_init__(self):
        eps1 = np.atleast_1d(np.asarray(self.eps1, dtype=float))
        eps2 = np.atleast_1d(np.asarray(self.eps2, dtype=float))
        R = float(self.R)
        cap = float(self.eps2_cap)
        if eps1.ndim != 1 or eps1.shape != eps2.shape:
            raise InvalidInputError("eps1 and eps2 must be 1-D vectors of equal length")
        m = eps1.shape[0]
        if not (np.isfinite(R) and R > 0):
            raise InvalidInputError(f"R must be a positive real, got {R}")
        if not np.all(np.isfinite(eps1)) or not np.all(np.isfinite(eps2)):
            raise InvalidInputError("eigenvalue bounds must be finite")
        if not (0 < cap < 1):
            raise InvalidInputError(f"eps2_cap must lie in (0, 1), got {cap}")
        if np.any(eps1 <= 0) or np.any(eps1 > eps2) or np.any(eps2 > cap):
            raise InvalidInputError(
                "bounds must satisfy 0 < eps1[j] <= eps2[j] <= eps2_cap for all j")
        log_vol = (m * m / 2.0) * math.log(math.pi) - _log_multigamma(m, m / 2.0) \
            + m * (m - 1) / 2.0 * math.log(cap)
        if log_vol > 1e-9:
            raise InvalidInputError(
                f"orthogonal-volume constraint violated: cap {cap} too large for m={m}")
        for name, arr in (("eps1", eps1), ("eps2", eps2)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "eps2_cap", cap)

    @property
    def m(self) -> int:
        return self.eps1.shape[0]

    @classmethod
    def uniform(cls, m: int, R: float = 1.0, eps1: float = 0.01,
                eps2: float = 0.25, eps2_cap: float | None = None) -> "DomainSpec":
        """Build a spec with identical per-coordinate bounds."""
        if eps2_cap is None:
            eps2_cap = eps2
        return cls(R=R, eps1=np.full(m, float(eps1)), eps2=np.full(m, float(eps2)),
                   eps2_cap=eps2_cap)


@dataclass(frozen=True, eq=False)
class DomainCheck:
    """Outcome of a membership test, with per-constraint slack.

    Positive slack means the constraint holds with room to spare; a negative
    entry identifies the violated constraint.  ``violations`` lists a
    human-readable line per violated constraint.
    """

    ok: bool
    violations: tuple[str, ...]
    mean_slack: float
    lower_slack: np.ndarray
    upper_slack: np.ndarray


def eigen_sym(matrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix with deterministic conventions.

    Returns ``(eigenvalues, basis)`` with eigenvalues ascending and orthonormal
    eigenvectors in the columns of ``basis``; each column is flipped so its
    largest-magnitude entry is non-negative.

    Raises
    ------
    InvalidInputError
        If the matrix is not square or not symmetric within 1e-9.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
    if np.max(np.abs(a - a.T)) > _SYMMETRY_TOL * scale:
        raise InvalidInputError("matrix is not symmetric within tolerance")
    sym = (a + a.T) / 2.0
    vals, vecs = np.linalg.eigh(sym)
    for j in range(vecs.shape[1]):
        i = int(np.argmax(np.abs(vecs[:, j])))
        if vecs[i, j] < 0:
            vecs[:, j] = -vecs[:, j]
    return vals, vecs


def compute_mle(data: Dataset) -> GaussianMle:
    """Gaussian maximum-likelihood estimates of a dataset.

    Mean is the sample mean; covariance uses the 1/n normalization (never
    1/(n-1)).  Needs at least two observations.
    """
    if data.n < 2:
        raise InsufficientDataError(f"need at least 2 observations, got {data.n}")
    x = data.rows
    mean = x.mean(axis=0)
    dev = x - mean
    cov = dev.T @ dev / data.n
    cov = (cov + cov.T) / 2.0
    vals, vecs = eigen_sym(cov)
    vals = np.maximum(vals, 0.0)  # clip eigh noise; a 1/n scatter matrix is PSD
    return GaussianMle(mean=mean, covariance=cov, eigenvalues=vals, eigenbasis=vecs)


def scale_dataset(data: Dataset, alpha: float) -> Dataset:
    """Divide every entry by ``alpha``.

    Under this conversion the MLEs transform as mean -> mean / alpha and
    eigenvalue -> eigenvalue / alpha^2.
    """
    alpha = float(alpha)
    if not (math.isfinite(alpha) and alpha > 0):
        raise InvalidInputError(f"alpha must be a positive finite real, got {alpha}")
    return Dataset(data.rows / alpha)


def check_domain(mle: GaussianMle, spec: DomainSpec) -> DomainCheck:
    """Test whether an MLE lies in the restricted domain.

    Ascending eigenvalues are matched index-wise against the bound vectors.
    """
    if mle.m != spec.m:
        raise InvalidInputError(f"dimension mismatch: mle m={mle.m}, spec m={spec.m}")
    norm_sq = float(mle.mean @ mle.mean)
    mean_slack = spec.R - norm_sq
    lower_slack = mle.eigenvalues - spec.eps1
    upper_slack = spec.eps2 - mle.eigenvalues
    violations: list[str] = []
    if mean_slack < 0:
        violations.append(f"||mean||^2 = {norm_sq:.6g} exceeds R = {spec.R:.6g}")
    for j in range(spec.m):
        if lower_slack[j] < 0:
            violations.append(
                f"eigenvalue[{j}] = {mle.eigenvalues[j]:.6g} below eps1[{j}] = {spec.eps1[j]:.6g}")
        if upper_slack[j] < 0:
            violations.append(
                f"eigenvalue[{j}] = {mle.eigenvalues[j]:.6g} above eps2[{j}] = {spec.eps2[j]:.6g}")
    return DomainCheck(ok=not violations, violations=tuple(violations),
                       mean_slack=mean_slack, lower_slack=lower_slack,
                       upper_slack=upper_slack)


def choose_scale(data: Dataset, spec: DomainSpec, margin: float = 1.0) -> float:
    """Smallest scale factor (times ``margin``) that brings the data inside the
    upper-bound constraints of the domain.

    Returns ``alpha = margin * max(||mean|| / sqrt(R), max_j sqrt(lam_j / eps2[j]), 1)``,
    so dividing the data by ``alpha`` satisfies the mean-norm and eigenvalue
    upper bounds.  The lower bounds ``eps1`` are not enforced here; they are
    configuration, typically derived from the scaled data afterwards.  Data
    whose covariance is identically zero is flagged with a warning and scaled
    from the mean constraint alone.
    """
    margin = float(margin)
    if not (math.isfinite(margin) and margin >= 1.0):
        raise InvalidInputError(f"margin must be >= 1, got {margin}")
    mle = compute_mle(data)
    if mle.m != spec.m:
        raise InvalidInputError(f"dimension mismatch: data m={mle.m}, spec m={spec.m}")
    mean_ratio = math.sqrt(float(mle.mean @ mle.mean) / spec.R)
    if np.all(mle.eigenvalues == 0.0):
        warnings.warn("degenerate data: all covariance eigenvalues are zero; "
                      "scale chosen from the mean constraint only", stacklevel=2)
        return margin * max(mean_ratio, 1.0)
    eig_ratio = math.sqrt(float(np.max(mle.eigenvalues / spec.eps2)))
    return margin * max(mean_ratio, eig_ratio, 1.0)


def load_csv(path, header: bool = False) -> Dataset:
    """Read a dataset from CSV, one observation per row, float columns.

    ``header=True`` skips the first line.  Parse failures raise
    InvalidInputError; missing files raise the usual OSError.
    """
    try:
        arr = np.loadtxt(path, delimiter=",", skiprows=1 if header else 0, ndmin=2)
    except ValueError as exc:
        raise InvalidInputError(f"could not parse CSV {path}: {exc}") from exc
    return Dataset(arr)


def save_csv(data: Dataset, path) -> None:
    """Write a dataset as CSV with full float64 round-trip precision."""
    np.savetxt(path, data.rows, delimiter=",", fmt="%.17g")
