"""Exact digital sequence points as dyadic rationals.

Points are generated by matrix-vector products over Z2 and kept as integer
numerators at a fixed precision, so every operation here is exact.  Floats
only appear when a caller asks for them.
"""

from __future__ import annotations

import csv
import datetime as _dt
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Sequence

from .errors import PrecisionError
from .gf2 import BitVector
from .niederreiter import GeneratingMatrixSet

__all__ = [
    "DyadicPoint",
    "PointSet",
    "digit_vector",
    "generate_points",
    "digital_shift",
    "tail_shift_vector",
    "block_decomposition",
    "sum_of_digits",
    "write_points_csv",
    "read_points_csv",
]

MAX_PRECISION = 64


@dataclass(frozen=True)
class DyadicPoint:
    """Point in [0,1)^d with coordinate j equal to numerators[j] / 2^precision."""

    numerators: tuple[int, ...]
    precision: int

    def __post_init__(self) -> None:
        if self.precision < 0:
            raise ValueError("precision must be nonnegative")
        for v in self.numerators:
            if v < 0 or v >> self.precision:
                raise ValueError(
                    f"numerator {v} out of range for precision {self.precision}"
                )

    @property
    def dimension(self) -> int:
        return len(self.numerators)

    def values(self) -> tuple[float, ...]:
        scale = 2.0 ** -self.precision
        return tuple(v * scale for v in self.numerators)

    def at_precision(self, precision: int) -> "DyadicPoint":
        """Same point with zero digits appended (precision may only grow)."""
        if precision < self.precision:
            raise ValueError("cannot lower precision without losing digits")
        shift = precision - self.precision
        return DyadicPoint(tuple(v << shift for v in self.numerators), precision)

    def xor(self, other: "DyadicPoint") -> "DyadicPoint":
        if self.dimension != other.dimension:
            raise ValueError("dimension mismatch in digital shift")
        w = max(self.precision, other.precision)
        a = self.at_precision(w)
        b = other.at_precision(w)
        return DyadicPoint(tuple(x ^ y for x, y in zip(a.numerators, b.numerators)), w)


@dataclass
class PointSet:
    """Ordered list of points sharing a dimension and precision."""

    points: list[DyadicPoint]
    provenance: str = ""

    def __post_init__(self) -> None:
        if not self.points:
            raise ValueError("point set must not be empty")
        d = self.points[0].dimension
        w = self.points[0].precision
        for p in self.points:
            if p.dimension != d or p.precision != w:
                raise ValueError("points disagree on dimension or precision")

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def dimension(self) -> int:
        return self.points[0].dimension

    @property
    def precision(self) -> int:
        return self.points[0].precision

    def numerator_columns(self) -> list[list[int]]:
        """Per-coordinate numerator lists, coordinate-major."""
        d = self.dimension
        return [[p.numerators[j] for p in self.points] for j in range(d)]

    def values(self) -> list[tuple[float, ...]]:
        return [p.values() for p in self.points]


def digit_vector(n: int, m: int) -> BitVector:
    """Least-significant-first binary digits of n, as a length-m vector."""
    if n < 0:
        raise ValueError(f"index must be nonnegative, got {n}")
    if n >> m:
        raise ValueError(f"index {n} does not fit in {m} digits")
    return BitVector(n, m)


def _column_numerators(gset: GeneratingMatrixSet, precision: int) -> list[list[int]]:
    """Numerator contribution of each input digit, per coordinate.

    Entry [j][b] is the numerator produced by C_j applied to the b-th unit
    digit vector, truncated to the first ``precision`` output digits (digit
    i carries weight 2^(precision - i)).
    """
    cols = gset.cols
    out = []
    for mat in gset.matrices:
        vals = [0] * cols
        for i, row_mask in enumerate(mat.row_masks[:precision]):
            weight = 1 << (precision - 1 - i)
            while row_mask:
                b = row_mask & -row_mask
                vals[b.bit_length() - 1] ^= weight
                row_mask ^= b
        out.append(vals)
    return out


def _point_numerators(column_vals: Sequence[Sequence[int]], n: int) -> tuple[int, ...]:
    coords = []
    for vals in column_vals:
        acc = 0
        nn = n
        b = 0
        while nn:
            if nn & 1:
                acc ^= vals[b]
            nn >>= 1
            b += 1
        coords.append(acc)
    return tuple(coords)


def generate_points(
    gset: GeneratingMatrixSet, count: int, precision: int | None = None
) -> PointSet:
    """First ``count`` points of the sequence, exact at the given precision.

    ``precision`` defaults to the full row extent of the matrices.  Points
    are returned in index order.
    """
    if precision is None:
        precision = gset.rows
    if precision > MAX_PRECISION:
        raise PrecisionError(
            f"precision {precision} exceeds the {MAX_PRECISION}-digit limit"
        )
    if precision > gset.rows:
        raise ValueError(
            f"precision {precision} exceeds the {gset.rows} rows available"
        )
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    if count > (1 << gset.cols):
        raise ValueError(
            f"cannot index {count} points with {gset.cols} matrix columns"
        )
    column_vals = _column_numerators(gset, precision)
    points = [
        DyadicPoint(_point_numerators(column_vals, n), precision)
        for n in range(count)
    ]
    return PointSet(points, provenance=gset.describe())


def digital_shift(pset: PointSet, shift: DyadicPoint) -> PointSet:
    """XOR every point with the shift, aligning precisions by zero padding."""
    if shift.dimension != pset.dimension:
        raise ValueError(
            f"shift dimension {shift.dimension} does not match point set {pset.dimension}"
        )
    shifted = [p.xor(shift) for p in pset.points]
    return PointSet(shifted, provenance=f"{pset.provenance} + digital shift")


def block_decomposition(total: int) -> list[int]:
    """Exponents m_1 > m_2 > ... with total = sum of 2^{m_i}."""
    if total < 1:
        raise ValueError(f"need a positive total, got {total}")
    return [b for b in range(total.bit_length() - 1, -1, -1) if (total >> b) & 1]


def tail_shift_vector(
    gset: GeneratingMatrixSet,
    block_index: int,
    total: int | Sequence[int],
    precision: int | None = None,
) -> DyadicPoint:
    """Digital shift carried by block ``block_index`` of an N-point prefix.

    Splitting N = 2^{m_1} + ... + 2^{m_r} (m_1 > ... > m_r) cuts the first N
    sequence points into consecutive blocks of those sizes.  Block i equals
    the 2^{m_i}-point net shifted by the image of the high digits shared by
    all its indices, which is exactly the sequence point at index
    2^{m_1} + ... + 2^{m_{i-1}}.  Blocks are numbered from 1.
    """
    if isinstance(total, int):
        exponents = block_decomposition(total)
    else:
        exponents = list(total)
        if any(e < 0 for e in exponents) or not exponents:
            raise ValueError(f"malformed decomposition {exponents}")
        if any(a <= b for a, b in zip(exponents, exponents[1:])):
            raise ValueError(f"exponents must be strictly decreasing, got {exponents}")
    if not 1 <= block_index <= len(exponents):
        raise ValueError(
            f"block index {block_index} out of range for {len(exponents)} blocks"
        )
    if precision is None:
        precision = gset.rows
    if precision > MAX_PRECISION:
        raise PrecisionError(
            f"precision {precision} exceeds the {MAX_PRECISION}-digit limit"
        )
    base = sum(1 << e for e in exponents[: block_index - 1])
    if base >> gset.cols:
        raise ValueError(
            f"block base index {base} does not fit in {gset.cols} matrix columns"
        )
    column_vals = _column_numerators(gset, precision)
    return DyadicPoint(_point_numerators(column_vals, base), precision)


def sum_of_digits(n: int) -> int:
    """Number of ones in the binary expansion of n (n >= 1)."""
    if n < 1:
        raise ValueError(f"need a positive integer, got {n}")
    return n.bit_count()


# ---------------------------------------------------------------------------
# CSV export / import.  Hex numerators are authoritative; the float column is
# a convenience for spreadsheets.
# ---------------------------------------------------------------------------


def _hex_field(numerator: int, precision: int) -> str:
    return f"0x{numerator:X}/{precision}"


def _parse_hex_field(text: str) -> tuple[int, int]:
    try:
        num_part, prec_part = text.split("/")
        return int(num_part, 16), int(prec_part)
    except ValueError as exc:
        raise ValueError(f"malformed dyadic field {text!r}") from exc


def write_points_csv(
    pset: PointSet, out: IO[str] | str | Path, timestamp: str | None = None
) -> None:
    """Write points with columns n, then per coordinate hex and float values.

    The single leading comment line names the generator and carries the only
    timestamp in the file.
    """
    if isinstance(out, (str, Path)):
        with open(out, "w", newline="") as fh:
            write_points_csv(pset, fh, timestamp=timestamp)
        return
    if timestamp is None:
        timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    out.write(f"# generator: {pset.provenance}; written: {timestamp}\n")
    writer = csv.writer(out, lineterminator="\n")
    d = pset.dimension
    header = ["n"]
    for j in range(1, d + 1):
        header += [f"x{j}_hex", f"x{j}"]
    writer.writerow(header)
    for n, p in enumerate(pset.points):
        row: list[str] = [str(n)]
        for num, val in zip(p.numerators, p.values()):
            row.append(_hex_field(num, p.precision))
            row.append(f"{val:.17g}")
        writer.writerow(row)


def read_points_csv(source: IO[str] | str | Path) -> PointSet:
    """Rebuild a point set from the CSV form, using the hex fields only."""
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            return read_points_csv(fh)
    provenance = ""
    rows = []
    reader = csv.reader(source)
    for row in reader:
        if not row:
            continue
        if row[0].startswith("#"):
            text = ",".join(row).lstrip("# ")
            if text.startswith("generator:"):
                provenance = text[len("generator:"):].split("; written:")[0].strip()
            continue
        if row[0] == "n":
            continue
        rows.append(row)
    if not rows:
        raise ValueError("no data rows in points CSV")
    points = []
    for row in rows:
        fields = row[1:]
        if len(fields) % 2:
            raise ValueError(f"odd field count in points row {row!r}")
        nums = []
        precision = None
        for hex_field in fields[0::2]:
            num, prec = _parse_hex_field(hex_field)
            if precision is None:
                precision = prec
            elif prec != precision:
                raise ValueError("inconsistent precisions in points row")
            nums.append(num)
        assert precision is not None
        points.append(DyadicPoint(tuple(nums), precision))
    return PointSet(points, provenance=provenance)
