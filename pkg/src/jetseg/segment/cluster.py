"""Intensity clustering segmenters: k-means (Lloyd) and a tied-variance Gaussian mixture.

Both operate on the 1-D intensity distribution, which for 8-bit images is
compressed to a 256-bin weighted histogram; results are identical to per-pixel
fitting because the models depend on pixel values only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, DegenerateError
from ..ingest import LabelMask


@dataclass(frozen=True)
class ClusterModel:
    """Fitted 1-D cluster parameters, ordered by ascending mean intensity.

    ``weights``/``means``/``variance`` are populated by the mixture fit;
    plain k-means leaves them None. The per-iteration traces allow
    monotonicity audits of the optimization.
    """

    k: int
    centers: tuple[float, ...]
    weights: tuple[float, ...] | None = None
    means: tuple[float, ...] | None = None
    variance: float | None = None
    inertia_trace: tuple[float, ...] = ()
    log_likelihood_trace: tuple[float, ...] = ()

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.weights is not None and abs(sum(self.weights) - 1.0) > 1e-9:
            raise ConfigError("mixture weights must sum to 1")
        if self.variance is not None and self.variance <= 0:
            raise ConfigError("shared variance must be > 0")


def _histogram(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    counts = np.bincount(np.asarray(img, dtype=np.uint8).ravel(), minlength=256)
    values = np.nonzero(counts)[0].astype(np.float64)
    return values, counts[counts > 0].astype(np.float64)


def _kmeans_pp_init(values: np.ndarray, counts: np.ndarray, k: int, rng) -> np.ndarray:
    """Weighted k-means++ seeding over the distinct intensity values."""
    probs = counts / counts.sum()
    centers = [values[rng.choice(len(values), p=probs)]]
    for _ in range(k - 1):
        d2 = np.min([(values - c) ** 2 for c in centers], axis=0)
        mass = d2 * counts
        if mass.sum() <= 0:
            # all remaining mass sits on existing centers; spread over leftovers
            unused = np.setdiff1d(values, np.array(centers))
            centers.append(unused[0] if len(unused) else centers[-1])
            continue
        centers.append(values[rng.choice(len(values), p=mass / mass.sum())])
    return np.array(sorted(centers), dtype=np.float64)


def _lloyd(
    values: np.ndarray,
    counts: np.ndarray,
    centers: np.ndarray,
    epsilon: float,
    max_iter: int,
) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Weighted 1-D Lloyd iterations; returns (centers, assignment, inertia trace)."""
    k = len(centers)
    trace: list[float] = []
    assign = np.zeros(len(values), dtype=np.int64)
    for _ in range(max_iter):
        d2 = (values[:, None] - centers[None, :]) ** 2
        assign = np.argmin(d2, axis=1)
        inertia = float((d2[np.arange(len(values)), assign] * counts).sum())
        if trace and inertia > trace[-1] + 1e-9:
            raise AssertionError("k-means inertia increased")
        trace.append(inertia)
        new_centers = centers.copy()
        for j in range(k):
            sel = assign == j
            mass = counts[sel].sum()
            if mass > 0:
                new_centers[j] = (values[sel] * counts[sel]).sum() / mass
            else:
                # re-seed an empty cluster at the farthest value
                far = int(np.argmax(d2[np.arange(len(values)), assign] * counts))
                new_centers[j] = values[far]
        movement = np.abs(new_centers - centers).max()
        centers = new_centers
        if movement < epsilon:
            d2 = (values[:, None] - centers[None, :]) ** 2
            assign = np.argmin(d2, axis=1)
            break
    return centers, assign, trace


def _labels_from_value_assignment(
    img: np.ndarray, values: np.ndarray, assign_sorted: np.ndarray
) -> np.ndarray:
    lut = np.zeros(256, dtype=np.uint8)
    lut[values.astype(np.intp)] = assign_sorted.astype(np.uint8)
    return lut[np.asarray(img, dtype=np.uint8)]


def _order_by_center(centers: np.ndarray, assign: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(centers, kind="stable")
    relabel = np.empty(len(centers), dtype=np.int64)
    relabel[order] = np.arange(len(centers))
    return centers[order], relabel[assign]


def kmeans_segment(
    img: np.ndarray,
    k: int = 4,
    epsilon: float = 0.2,
    max_iter: int = 100,
    seed: int = 0,
) -> tuple[LabelMask, ClusterModel]:
    """Lloyd k-means on intensities; clusters sorted dark to bright become labels 0..k-1.

    Iterations stop when the largest center movement drops below ``epsilon``
    (intensity levels) or at ``max_iter``. Inertia is recorded per iteration
    and must never increase.
    """
    if k < 1:
        raise ConfigError("k must be >= 1")
    values, counts = _histogram(img)
    if len(values) < k:
        raise DegenerateError(f"image has {len(values)} distinct values < k={k}")
    rng = np.random.default_rng(seed)
    centers = _kmeans_pp_init(values, counts, k, rng)
    centers, assign, trace = _lloyd(values, counts, centers, epsilon, max_iter)
    centers_sorted, assign_sorted = _order_by_center(centers, assign)
    labels = _labels_from_value_assignment(img, values, assign_sorted)
    model = ClusterModel(
        k=k,
        centers=tuple(float(c) for c in centers_sorted),
        inertia_trace=tuple(trace),
    )
    return LabelMask(labels=labels), model


def _log_likelihood(
    values: np.ndarray,
    counts: np.ndarray,
    pis: np.ndarray,
    mus: np.ndarray,
    var: float,
) -> tuple[float, np.ndarray]:
    """Weighted data log-likelihood and responsibilities for a tied-variance mixture."""
    with np.errstate(divide="ignore"):  # a dead component has log weight -inf
        log_pis = np.log(pis)
    log_comp = (
        log_pis[None, :]
        - 0.5 * np.log(2.0 * np.pi * var)
        - 0.5 * (values[:, None] - mus[None, :]) ** 2 / var
    )
    m = log_comp.max(axis=1, keepdims=True)
    log_norm = m[:, 0] + np.log(np.exp(log_comp - m).sum(axis=1))
    resp = np.exp(log_comp - log_norm[:, None])
    return float((log_norm * counts).sum()), resp


def gmm_segment(
    img: np.ndarray,
    components: int = 4,
    covariance: str = "tied",
    max_iter: int = 200,
    tol: float = 1e-6,
    seed: int = 0,
) -> tuple[LabelMask, ClusterModel]:
    """EM fit of a 1-D Gaussian mixture with one shared variance, seeded by k-means.

    Pixels take the argmax-posterior component; components are ordered by
    ascending mean so the darkest maps to background and the brightest to the
    central zone. The log-likelihood is tracked every iteration and must be
    non-decreasing (within 1e-9); a shared variance below 1e-12 aborts.
    """
    if covariance != "tied":
        raise ConfigError(f"only tied covariance is supported, got {covariance!r}")
    if components < 1:
        raise ConfigError("components must be >= 1")
    values, counts = _histogram(img)
    if len(values) < components:
        raise DegenerateError(
            f"image has {len(values)} distinct values < components={components}"
        )
    _, km = kmeans_segment(img, k=components, epsilon=0.2, max_iter=100, seed=seed)
    mus = np.array(km.centers, dtype=np.float64)
    n = counts.sum()
    pis = np.full(components, 1.0 / components)
    d2 = (values[:, None] - mus[None, :]) ** 2
    var = float((d2.min(axis=1) * counts).sum() / n)
    var = max(var, 1e-6)

    trace: list[float] = []
    ll, resp = _log_likelihood(values, counts, pis, mus, var)
    trace.append(ll)
    for _ in range(max_iter):
        wr = resp * counts[:, None]
        nk = wr.sum(axis=0)
        pis = nk / n
        mus = (wr * values[:, None]).sum(axis=0) / np.maximum(nk, 1e-300)
        var = float((wr * (values[:, None] - mus[None, :]) ** 2).sum() / n)
        if var < 1e-12:
            raise DegenerateError("shared variance collapsed below 1e-12")
        ll, resp = _log_likelihood(values, counts, pis, mus, var)
        if ll < trace[-1] - 1e-9:
            raise AssertionError("mixture log-likelihood decreased")
        improved = ll - trace[-1] >= tol
        trace.append(ll)
        if not improved:
            break

    order = np.argsort(mus, kind="stable")
    assign = np.argmax(resp, axis=1)
    relabel = np.empty(components, dtype=np.int64)
    relabel[order] = np.arange(components)
    labels = _labels_from_value_assignment(img, values, relabel[assign])
    model = ClusterModel(
        k=components,
        centers=tuple(float(m) for m in mus[order]),
        weights=tuple(float(p) for p in pis[order]),
        means=tuple(float(m) for m in mus[order]),
        variance=var,
        log_likelihood_trace=tuple(trace),
    )
    return LabelMask(labels=labels), model
