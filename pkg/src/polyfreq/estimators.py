"""Sparse-histogram and frequency polygon density estimators.

All estimators share one bin geometry: for bin width ``b`` the real line is
cut into half-open cells ``(z*b, (z+1)*b]`` anchored at zero, so a point
sitting exactly on a bin edge belongs to the cell below it.  This strict
lower-edge convention is what keeps the two frequency polygon evaluation
routes (:func:`fp_eval`, built from shift operators acting on the empirical
CDF, and :func:`fp_eval_classic`, the textbook midpoint interpolation) in
agreement everywhere, including exactly on bin edges and midpoints.

Histograms are stored sparsely as a map from occupied bin index to count,
so evaluation cost depends on the number of occupied bins and never on the
sample size: each density query touches the two cells adjacent to the query
point and nothing else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np

__all__ = [
    "BinningScheme",
    "SparseHistogram",
    "EmpiricalCdf",
    "HistogramDensity",
    "FrequencyPolygonDensity",
    "KdeBaselineDensity",
    "bin_origin",
    "build_histogram",
    "accumulate_counts",
    "merge_counts",
    "histogram_eval",
    "cdf_bin_density",
    "interp_weight",
    "fp_eval",
    "fp_eval_classic",
    "stone_bandwidth",
    "kde_eval_naive",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _as_finite_array(x, name: str = "x") -> tuple[np.ndarray, bool]:
    """Coerce to a float array, rejecting non-finite entries."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr, arr.ndim == 0


@dataclass(frozen=True)
class BinningScheme:
    """Uniform bin geometry: a positive width with the grid anchored at 0.

    Bin ``z`` is the half-open interval ``(z*b, (z+1)*b]``.  Bin membership
    is resolved against the floating-point products ``z*b``, with an explicit
    one-ulp correction after the ``ceil(x/b)`` index guess, so the strict
    lower-edge rule is bit-reproducible even when ``x/b`` rounds onto an
    integer.
    """

    bin_width: float

    def __post_init__(self) -> None:
        w = self.bin_width
        if not isinstance(w, (int, float)) or isinstance(w, bool):
            raise ValueError(f"bin_width must be a real number, got {w!r}")
        w = float(w)
        if not (math.isfinite(w) and w > 0.0):
            raise ValueError(f"bin_width must be positive and finite, got {w!r}")
        object.__setattr__(self, "bin_width", w)

    def bin_index(self, x):
        """Index ``z`` of the bin ``(z*b, (z+1)*b]`` containing ``x``."""
        arr, scalar = _as_finite_array(x)
        b = self.bin_width
        z = np.ceil(arr / b) - 1.0
        # x/b can land within an ulp of an integer; re-check against the
        # actual float bin edges so that z*b < x <= (z+1)*b always holds.
        z = np.where(arr <= z * b, z - 1.0, z)
        z = np.where(arr > (z + 1.0) * b, z + 1.0, z)
        out = z.astype(np.int64)
        return int(out[()]) if scalar else out

    def bin_origin(self, x):
        """Greatest integer multiple of the bin width strictly below ``x``."""
        arr, scalar = _as_finite_array(x)
        out = self.bin_index(arr) * self.bin_width
        return float(out) if scalar else out

    def half_grid_index(self, x):
        """Integer ``k`` with ``k*b - b/2 < x <= k*b + b/2``.

        This locates the midpoint-to-midpoint cell used by the frequency
        polygon; the ceiling form (rather than an average of two floors)
        stays correct on the cell's closed right endpoint.
        """
        arr, scalar = _as_finite_array(x)
        b = self.bin_width
        half = 0.5 * b
        k = np.ceil(arr / b - 0.5)
        k = np.where(arr <= k * b - half, k - 1.0, k)
        k = np.where(arr > k * b + half, k + 1.0, k)
        return float(k[()]) if scalar else k


def bin_origin(x, scheme: BinningScheme):
    """Greatest bin edge strictly lower than ``x`` (see ``BinningScheme``)."""
    return scheme.bin_origin(x)


class SparseHistogram:
    """Immutable map from occupied bin index to count, plus the sample size.

    Only nonzero bins are stored, which makes the number of occupied bins
    (``occupied``) the cost driver for evaluation and serialization rather
    than the data range or the sample size.
    """

    __slots__ = ("scheme", "n", "_counts", "_keys", "_values")

    def __init__(self, scheme: BinningScheme, counts: Mapping[int, int], n: int):
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
            raise ValueError(f"n must be a positive integer, got {n!r}")
        items = sorted((int(z), int(c)) for z, c in counts.items())
        total = 0
        for z, c in items:
            if c < 1:
                raise ValueError(f"bin {z} has count {c}; empty bins must be absent")
            total += c
        if total > n:
            raise ValueError(f"counts sum to {total} > n = {n}")
        self.scheme = scheme
        self.n = int(n)
        self._counts = dict(items)
        self._keys = np.fromiter((z for z, _ in items), dtype=np.int64, count=len(items))
        self._values = np.fromiter((c for _, c in items), dtype=np.int64, count=len(items))

    @property
    def counts(self) -> dict[int, int]:
        """Copy of the occupied-bin count map."""
        return dict(self._counts)

    @property
    def occupied(self) -> int:
        """Number of nonzero bins."""
        return len(self._counts)

    @property
    def total_count(self) -> int:
        return int(self._values.sum()) if len(self._values) else 0

    def count(self, z: int) -> int:
        return self._counts.get(int(z), 0)

    def counts_at(self, z) -> np.ndarray:
        """Counts for an array of bin indices (0 for absent bins)."""
        z = np.asarray(z, dtype=np.int64)
        pos = np.searchsorted(self._keys, z)
        pos_c = np.minimum(pos, len(self._keys) - 1)
        hit = (pos < len(self._keys)) & (self._keys[pos_c] == z)
        return np.where(hit, self._values[pos_c], 0)

    def occupied_range(self) -> tuple[int, int]:
        """Smallest and largest occupied bin index."""
        if not len(self._keys):
            raise ValueError("histogram has no occupied bins")
        return int(self._keys[0]), int(self._keys[-1])

    def to_json_obj(self) -> dict:
        """JSON-ready form: ``{bin_width, n, bins: [[index, count], ...]}``."""
        return {
            "bin_width": self.scheme.bin_width,
            "n": self.n,
            "bins": [[z, c] for z, c in self._counts.items()],
        }

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "SparseHistogram":
        scheme = BinningScheme(obj["bin_width"])
        counts = {int(z): int(c) for z, c in obj["bins"]}
        return cls(scheme, counts, int(obj["n"]))

    def __repr__(self) -> str:
        return (
            f"SparseHistogram(n={self.n}, bin_width={self.scheme.bin_width}, "
            f"occupied={self.occupied})"
        )


def accumulate_counts(counts: dict[int, int], sample, scheme: BinningScheme) -> int:
    """Add one chunk of data to a count map in place; returns the chunk size.

    Entries must be finite; offending positions (within the chunk) are
    reported in the raised error.
    """
    arr = np.asarray(sample, dtype=float).ravel()
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        shown = ", ".join(str(i) for i in bad[:10].tolist())
        more = "" if bad.size <= 10 else f" (+{bad.size - 10} more)"
        raise ValueError(f"non-finite sample entries at indices {shown}{more}")
    z = scheme.bin_index(arr)
    keys, reps = np.unique(z, return_counts=True)
    for k, c in zip(keys.tolist(), reps.tolist()):
        counts[k] = counts.get(k, 0) + c
    return arr.size


def merge_counts(parts: Iterable[Mapping[int, int]]) -> dict[int, int]:
    """Merge count maps by addition (partition-and-merge parallel builds)."""
    out: dict[int, int] = {}
    for part in parts:
        for z, c in part.items():
            out[z] = out.get(z, 0) + int(c)
    return out


def build_histogram(sample, scheme: BinningScheme) -> SparseHistogram:
    """Bin a sample in one pass; memory scales with the occupied-bin count."""
    arr = np.asarray(sample, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError("sample must be nonempty")
    counts: dict[int, int] = {}
    n = accumulate_counts(counts, arr, scheme)
    return SparseHistogram(scheme, counts, n)


def histogram_eval(h: SparseHistogram, x):
    """Histogram density ``count / (n * b)`` of the bin containing ``x``."""
    arr, scalar = _as_finite_array(x)
    z = h.scheme.bin_index(np.atleast_1d(arr))
    dens = h.counts_at(z) / (h.n * h.scheme.bin_width)
    return float(dens[0]) if scalar else dens.reshape(arr.shape)


def cdf_bin_density(F: Callable, scheme: BinningScheme, x):
    """Bin-averaged density implied by a CDF-like function ``F``.

    Returns ``(F(hi) - F(lo)) / b`` for the bin ``(lo, hi]`` containing
    ``x``.  Applied to an empirical CDF this reproduces ``histogram_eval``
    exactly; applied to a smooth CDF it gives the bin average of its
    density, whose error is bounded by the density's Lipschitz constant
    times the bin width.  ``F`` must accept numpy arrays.
    """
    arr, scalar = _as_finite_array(x)
    b = scheme.bin_width
    z = scheme.bin_index(np.atleast_1d(arr)).astype(float)
    out = (np.asarray(F((z + 1.0) * b), dtype=float) - np.asarray(F(z * b), dtype=float)) / b
    return float(out[0]) if scalar else out.reshape(arr.shape)


def interp_weight(x, scheme: BinningScheme):
    """Linear interpolation weight toward the midpoint above ``x``.

    For ``x`` in the midpoint cell ``(k*b - b/2, k*b + b/2]`` this is
    ``1/2 - k + x/b``, rising from 0 (exclusive) at the lower midpoint to 1
    at the cell's closed right end.  The result is clipped to ``[0, 1]``;
    the value 0 itself is reachable only through rounding right at a cell
    edge, where both neighbouring weight configurations give the same
    density.
    """
    arr, scalar = _as_finite_array(x)
    k = scheme.half_grid_index(arr)
    u = np.clip(0.5 - k + arr / scheme.bin_width, 0.0, 1.0)
    return float(u[()]) if scalar else u


def fp_eval(h: SparseHistogram, x):
    """Frequency polygon density, evaluated in shift-operator form.

    Computes ``(1-u) * f(x - b/2) + u * f(x + b/2)`` with ``f`` the
    histogram density and ``u`` the interpolation weight.  The half-shifted
    lookups are resolved by composing the shift with the binning rule: for
    ``x`` in the midpoint cell ``(k*b - b/2, k*b + b/2]`` the two shifted
    points land in bins ``k-1`` and ``k`` — always, so the composition is
    evaluated through those indices directly.  (Forming ``x - b/2`` in
    floating point first can round exactly onto a bin edge and flip the
    lookup into the wrong bin for ``x`` within one ulp of a cell edge.)
    """
    arr, scalar = _as_finite_array(x)
    arr1 = np.atleast_1d(arr)
    b = h.scheme.bin_width
    k = h.scheme.half_grid_index(arr1)
    u = np.clip(0.5 - k + arr1 / b, 0.0, 1.0)
    ki = k.astype(np.int64)
    denom = h.n * b
    below = h.counts_at(ki - 1) / denom
    above = h.counts_at(ki) / denom
    out = (1.0 - u) * below + u * above
    return float(out[0]) if scalar else out.reshape(arr.shape)


def fp_eval_classic(h: SparseHistogram, x):
    """Frequency polygon density via the classical midpoint interpolation.

    Locates the integer ``k`` with ``k*b - b/2 < x <= k*b + b/2`` and blends
    the densities of the bins below and above ``k*b``.  Kept as a fully
    independent evaluation route: it must agree with :func:`fp_eval` at
    every point, bin edges and midpoints included.
    """
    arr, scalar = _as_finite_array(x)
    b = h.scheme.bin_width
    k = h.scheme.half_grid_index(arr)
    w_hi = np.clip(0.5 - k + arr / b, 0.0, 1.0)
    w_lo = np.clip(0.5 + k - arr / b, 0.0, 1.0)
    out = w_lo * histogram_eval(h, k * b) + w_hi * histogram_eval(h, (k + 1.0) * b)
    return float(out) if scalar else out


def stone_bandwidth(n: int) -> float:
    """Bin width ``(ln(n) / n)**(1/3)``, the uniform-rate-optimal schedule."""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ValueError(f"n must be an integer, got {n!r}")
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    return (math.log(n) / n) ** (1.0 / 3.0)


def kde_eval_naive(sample, bandwidth: float, x):
    """Gaussian kernel density estimate, deliberately O(n) per query point.

    Serves as the cost baseline against the frequency polygon: every query
    touches the whole sample.
    """
    arr = np.asarray(sample, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError("sample must be nonempty")
    if not (math.isfinite(bandwidth) and bandwidth > 0):
        raise ValueError(f"bandwidth must be positive, got {bandwidth!r}")
    xs, scalar = _as_finite_array(x)
    xs1 = np.atleast_1d(xs)
    out = np.empty(xs1.shape, dtype=float)
    scale = 1.0 / (arr.size * bandwidth * _SQRT_2PI)
    # one reused work buffer: the O(n)-per-query loop is the whole point,
    # but allocating fresh temporaries each query would just time the heap
    work = np.empty_like(arr)
    inv_h = 1.0 / bandwidth
    for i, xi in enumerate(xs1):
        np.subtract(xi, arr, out=work)
        work *= inv_h
        np.multiply(work, work, out=work)
        work *= -0.5
        np.exp(work, out=work)
        out[i] = work.sum() * scale
    return float(out[0]) if scalar else out.reshape(xs.shape)


class EmpiricalCdf:
    """Right-continuous empirical distribution function of a sample."""

    __slots__ = ("sorted_sample", "n")

    def __init__(self, sample):
        arr = np.asarray(sample, dtype=float).ravel()
        if arr.size == 0:
            raise ValueError("sample must be nonempty")
        if not np.all(np.isfinite(arr)):
            raise ValueError("sample must be finite")
        self.sorted_sample = np.sort(arr)
        self.n = int(arr.size)

    def __call__(self, x):
        """Fraction of sample points ``<= x``."""
        arr = np.asarray(x, dtype=float)
        out = np.searchsorted(self.sorted_sample, arr, side="right") / self.n
        return float(out[()]) if arr.ndim == 0 else out

    def below(self, x):
        """Fraction of sample points ``< x`` (the left limit of the ECDF)."""
        arr = np.asarray(x, dtype=float)
        out = np.searchsorted(self.sorted_sample, arr, side="left") / self.n
        return float(out[()]) if arr.ndim == 0 else out


@dataclass(frozen=True)
class HistogramDensity:
    """Histogram estimate wrapped as a callable density."""

    hist: SparseHistogram
    kind = "histogram"

    @property
    def scheme(self) -> BinningScheme:
        return self.hist.scheme

    def __call__(self, x):
        return histogram_eval(self.hist, x)


@dataclass(frozen=True)
class FrequencyPolygonDensity:
    """Frequency polygon estimate wrapped as a callable density.

    Continuous and piecewise linear, with knots exactly at bin midpoints.
    """

    hist: SparseHistogram
    kind = "frequency_polygon"

    @property
    def scheme(self) -> BinningScheme:
        return self.hist.scheme

    def __call__(self, x):
        return fp_eval(self.hist, x)


class KdeBaselineDensity:
    """Naive Gaussian KDE wrapped as a callable density (cost baseline)."""

    __slots__ = ("sample", "bandwidth")
    kind = "kde_baseline"

    def __init__(self, sample, bandwidth: float):
        arr = np.asarray(sample, dtype=float).ravel()
        if arr.size == 0:
            raise ValueError("sample must be nonempty")
        self.sample = arr
        self.bandwidth = float(bandwidth)

    def __call__(self, x):
        return kde_eval_naive(self.sample, self.bandwidth, x)
