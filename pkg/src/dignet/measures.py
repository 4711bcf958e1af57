"""Periodic L2 discrepancy and diaphony of dyadic point sets.

Both measures are quadratic forms in exponential sums with per-frequency
weights.  Summing the weighted Fourier series per coordinate collapses the
series into the closed-form pairwise kernel factor

    K1(x, y) = 1 + c * B2({x - y})

with c = 3 for the periodic L2 discrepancy and c = 2*pi^2 for diaphony,
where B2(t) = t^2 - t + 1/6.  The closed form is a derivation this package
owns; the test suite gates it against the truncated exponential-sum
evaluator (``fourier_truncated``), which is kept free of kernel shortcuts.

Pair sums run over n < p once (the kernel is symmetric), the diagonal is
added in closed form, and accumulation uses error-free transforms
(math.fsum over per-row partial sums collected in a fixed order), so
results do not depend on the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import PrecisionError
from .sequence import PointSet

__all__ = [
    "MeasureReport",
    "WeightScheme",
    "PERIODIC_L2",
    "DIAPHONY",
    "bernoulli2",
    "periodic_l2",
    "diaphony",
    "both_kernel_measures",
    "fourier_truncated",
]


def bernoulli2(t: float) -> float:
    """Periodically extended second Bernoulli polynomial, t^2 - t + 1/6 on [0,1)."""
    return t * t - t + 1.0 / 6.0


@dataclass(frozen=True)
class WeightScheme:
    """Frequency weights of one measure.

    ``kernel_coeff`` is the constant c in the collapsed kernel factor
    1 + c*B2, ``prefactor_base`` the per-dimension global scale (the full
    prefactor is prefactor_base**d).
    """

    name: str
    kernel_coeff: float
    prefactor_base: float

    def prefactor(self, dimension: int) -> float:
        return self.prefactor_base**dimension

    def inverse_weight_sq(self, freqs: np.ndarray) -> np.ndarray:
        """1 / weight(h)^2 for an integer frequency array."""
        h = np.asarray(freqs, dtype=np.float64)
        out = np.ones_like(h)
        nz = h != 0.0
        if self.name == "periodic-l2":
            # r(h) = 2*pi*|h|/sqrt(6) for h != 0
            out[nz] = 6.0 / (4.0 * math.pi**2 * h[nz] ** 2)
        else:
            # rho factor max(1, |h|)
            out[nz] = 1.0 / h[nz] ** 2
        return out


PERIODIC_L2 = WeightScheme("periodic-l2", 3.0, 1.0 / 3.0)
DIAPHONY = WeightScheme("diaphony", 2.0 * math.pi**2, 1.0)


@dataclass
class MeasureReport:
    """Result of one measure evaluation."""

    measure: str
    method: str
    value: float
    squared: float
    size: int
    dimension: int
    truncation: dict | None = None
    generator: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "measure": self.measure,
            "method": self.method,
            "value": self.value,
            "squared": self.squared,
            "N": self.size,
            "d": self.dimension,
            "truncation": self.truncation,
            "generator": self.generator,
        }


def _uint64_columns(pset: PointSet) -> tuple[list[np.ndarray], int]:
    w = pset.precision
    if w > 64:
        raise PrecisionError(f"precision {w} exceeds the 64-digit limit")
    cols = [
        np.array(col, dtype=np.uint64) for col in pset.numerator_columns()
    ]
    return cols, w


def _pair_rowsums(
    columns: Sequence[np.ndarray],
    precision: int,
    factor_fns: Sequence[Callable[[np.ndarray], np.ndarray]],
    block: int,
    threads: int,
) -> list[np.ndarray]:
    """Per-row sums of prod_j f(delta_j) over strictly upper pairs (p > n).

    ``delta_j`` is the exact fractional difference of coordinate j, computed
    as a numerator difference mod 2^precision before float conversion.  One
    rowsum array per factor function is returned; entries keep row order, so
    callers can combine partitions deterministically.
    """
    n = columns[0].shape[0]
    mask = np.uint64((1 << precision) - 1 if precision < 64 else 0xFFFFFFFFFFFFFFFF)
    scale = 2.0**-precision
    starts = list(range(0, n, block))

    def run_block(i0: int) -> list[np.ndarray]:
        i1 = min(i0 + block, n)
        prods: list[np.ndarray] | None = None
        for col in columns:
            diff = (col[i0:i1, None] - col[None, :]) & mask
            t = diff.astype(np.float64) * scale
            tm = t * (t - 1.0)
            if prods is None:
                prods = [fn(tm) for fn in factor_fns]
            else:
                for k, fn in enumerate(factor_fns):
                    prods[k] *= fn(tm)
        assert prods is not None
        out = []
        for prod in prods:
            rows = np.empty(i1 - i0)
            for bi in range(i1 - i0):
                rows[bi] = prod[bi, i0 + bi + 1 :].sum()
            out.append(rows)
        return out

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            block_results = list(pool.map(run_block, starts))
    else:
        block_results = [run_block(i0) for i0 in starts]

    combined = []
    for k in range(len(factor_fns)):
        combined.append(np.concatenate([res[k] for res in block_results]))
    return combined


def _kernel_squared(
    pset: PointSet,
    schemes: Sequence[WeightScheme],
    block: int,
    threads: int,
) -> list[float]:
    columns, w = _uint64_columns(pset)
    n = pset.size
    d = pset.dimension

    def make_factor(coeff: float) -> Callable[[np.ndarray], np.ndarray]:
        base = 1.0 + coeff / 6.0

        def factor(tm: np.ndarray) -> np.ndarray:
            return base + coeff * tm

        return factor

    rowsum_sets = _pair_rowsums(
        columns, w, [make_factor(s.kernel_coeff) for s in schemes], block, threads
    )
    out = []
    for scheme, rowsums in zip(schemes, rowsum_sets):
        diag = n * (1.0 + scheme.kernel_coeff / 6.0) ** d
        total = diag + 2.0 * math.fsum(rowsums.tolist())
        out.append(scheme.prefactor(d) * (total / (n * n) - 1.0))
    return out


def _report(
    pset: PointSet,
    scheme: WeightScheme,
    method: str,
    squared: float,
    truncation: dict | None = None,
) -> MeasureReport:
    return MeasureReport(
        measure=scheme.name,
        method=method,
        value=math.sqrt(max(squared, 0.0)),
        squared=squared,
        size=pset.size,
        dimension=pset.dimension,
        truncation=truncation,
        generator=pset.provenance or None,
    )


def periodic_l2(pset: PointSet, *, block: int = 1024, threads: int = 1) -> MeasureReport:
    """Periodic L2 discrepancy via the closed-form pairwise kernel."""
    squared = _kernel_squared(pset, [PERIODIC_L2], block, threads)[0]
    return _report(pset, PERIODIC_L2, "kernel", squared)


def diaphony(pset: PointSet, *, block: int = 1024, threads: int = 1) -> MeasureReport:
    """Diaphony via the closed-form pairwise kernel."""
    squared = _kernel_squared(pset, [DIAPHONY], block, threads)[0]
    return _report(pset, DIAPHONY, "kernel", squared)


def both_kernel_measures(
    pset: PointSet, *, block: int = 1024, threads: int = 1
) -> tuple[MeasureReport, MeasureReport]:
    """Periodic L2 discrepancy and diaphony in one pass over the pairs."""
    sq_l2, sq_dia = _kernel_squared(pset, [PERIODIC_L2, DIAPHONY], block, threads)
    return (
        _report(pset, PERIODIC_L2, "kernel", sq_l2),
        _report(pset, DIAPHONY, "kernel", sq_dia),
    )


def fourier_truncated(
    pset: PointSet,
    scheme: WeightScheme,
    trunc: int,
    *,
    block: int = 256,
    threads: int = 1,
) -> MeasureReport:
    """Truncated frequency-sum evaluator, the measures' independent oracle.

    Evaluates the defining sum over h in {-trunc..trunc}^d minus the origin,
    reorganized over point pairs: the weighted exponential sums collapse to
    the truncated cosine kernel 1 + sum_h 2*w(h)*cos(2*pi*h*delta) per
    coordinate, which is an exact finite reordering, not the closed form.
    Cost grows with trunc; intended for cross-checks, not production use.
    """
    if trunc < 1:
        raise ValueError(f"truncation bound must be >= 1, got {trunc}")
    columns, w = _uint64_columns(pset)
    n = pset.size
    d = pset.dimension
    hs = np.arange(1, trunc + 1, dtype=np.float64)
    weights = scheme.inverse_weight_sq(hs)
    k_zero = 1.0 + 2.0 * float(weights.sum())
    mask = np.uint64((1 << w) - 1 if w < 64 else 0xFFFFFFFFFFFFFFFF)
    scale = 2.0**-w
    starts = list(range(0, n, block))

    def run_block(i0: int) -> np.ndarray:
        i1 = min(i0 + block, n)
        prod = np.ones((i1 - i0, n))
        for col in columns:
            diff = (col[i0:i1, None] - col[None, :]) & mask
            angles = (2.0 * math.pi) * (diff.astype(np.float64) * scale)
            k_h = np.ones_like(angles)
            for h0 in range(0, trunc, 64):
                h_chunk = hs[h0 : h0 + 64]
                w_chunk = weights[h0 : h0 + 64]
                cosines = np.cos(angles[..., None] * h_chunk)
                k_h += 2.0 * (cosines @ w_chunk)
            prod *= k_h
        rows = np.empty(i1 - i0)
        for bi in range(i1 - i0):
            rows[bi] = prod[bi, i0 + bi + 1 :].sum()
        return rows

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rowsum_blocks = list(pool.map(run_block, starts))
    else:
        rowsum_blocks = [run_block(i0) for i0 in starts]
    rowsums = np.concatenate(rowsum_blocks)
    total = n * k_zero**d + 2.0 * math.fsum(rowsums.tolist())
    squared = scheme.prefactor(d) * (total / (n * n) - 1.0)
    return _report(pset, scheme, "fourier", squared, truncation={"H": trunc})
