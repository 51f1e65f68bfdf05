"""Sparse matrices over exact rationals, sized for desk-scale operator work.

Row-major dict-of-dicts storage; entries are Fractions (plain ints are fine
too, the numeric tower keeps results exact).  Norm estimation is the only
place floats appear, and it is clearly separated.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

import numpy as np


class RatMatrix:
    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int,
                 entries: dict[tuple[int, int], Fraction] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.rows: dict[int, dict[int, Fraction]] = {}
        if entries:
            for (i, j), v in entries.items():
                if v:
                    self.rows.setdefault(i, {})[j] = v

    @staticmethod
    def zero(nrows: int, ncols: int) -> "RatMatrix":
        return RatMatrix(nrows, ncols)

    @staticmethod
    def identity(n: int) -> "RatMatrix":
        m = RatMatrix(n, n)
        for i in range(n):
            m.rows[i] = {i: Fraction(1)}
        return m

    def get(self, i: int, j: int) -> Fraction:
        return self.rows.get(i, {}).get(j, Fraction(0))

    def set(self, i: int, j: int, v) -> None:
        if v:
            self.rows.setdefault(i, {})[j] = Fraction(v)
        else:
            row = self.rows.get(i)
            if row:
                row.pop(j, None)
                if not row:
                    del self.rows[i]

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def is_zero(self) -> bool:
        return not self.rows

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            return False
        return self.rows == other.rows

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        self._shape_check(other)
        out = RatMatrix(self.nrows, self.ncols)
        for i, row in self.rows.items():
            out.rows[i] = dict(row)
        for i, row in other.rows.items():
            dst = out.rows.setdefault(i, {})
            for j, v in row.items():
                s = dst.get(j, 0) + v
                if s:
                    dst[j] = s
                else:
                    dst.pop(j, None)
            if not dst:
                del out.rows[i]
        return out

    def __neg__(self) -> "RatMatrix":
        out = RatMatrix(self.nrows, self.ncols)
        for i, row in self.rows.items():
            out.rows[i] = {j: -v for j, v in row.items()}
        return out

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return self + (-other)

    def scale(self, c) -> "RatMatrix":
        c = Fraction(c)
        if not c:
            return RatMatrix(self.nrows, self.ncols)
        out = RatMatrix(self.nrows, self.ncols)
        for i, row in self.rows.items():
            out.rows[i] = {j: c * v for j, v in row.items()}
        return out

    def __mul__(self, other: "RatMatrix") -> "RatMatrix":
        self._mul_check(other)
        out = RatMatrix(self.nrows, other.ncols)
        for i, row in self.rows.items():
            acc: dict[int, Fraction] = {}
            for j, a in row.items():
                brow = other.rows.get(j)
                if not brow:
                    continue
                for k, b in brow.items():
                    s = acc.get(k, 0) + a * b
                    if s:
                        acc[k] = s
                    else:
                        acc.pop(k, None)
            if acc:
                out.rows[i] = acc
        return out

    def transpose(self) -> "RatMatrix":
        out = RatMatrix(self.ncols, self.nrows)
        for i, row in self.rows.items():
            for j, v in row.items():
                out.rows.setdefault(j, {})[i] = v
        return out

    # all matrices here have rational entries, so adjoint == transpose
    star = transpose

    def restrict_columns(self, cols: Iterable[int]) -> "RatMatrix":
        """Zero out every column outside cols (same shape)."""
        keep = set(cols)
        out = RatMatrix(self.nrows, self.ncols)
        for i, row in self.rows.items():
            kept = {j: v for j, v in row.items() if j in keep}
            if kept:
                out.rows[i] = kept
        return out

    def equal_on_columns(self, other: "RatMatrix", cols: Iterable[int]) -> bool:
        self._shape_check(other)
        keep = list(cols)
        for i in set(self.rows) | set(other.rows):
            a = self.rows.get(i, {})
            b = other.rows.get(i, {})
            for j in keep:
                if a.get(j, 0) != b.get(j, 0):
                    return False
        return True

    def to_numpy(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols))
        for i, row in self.rows.items():
            for j, v in row.items():
                out[i, j] = float(v)
        return out

    def _shape_check(self, other: "RatMatrix") -> None:
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError(f"shape mismatch {self.nrows}x{self.ncols} vs "
                             f"{other.nrows}x{other.ncols}")

    def _mul_check(self, other: "RatMatrix") -> None:
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.nrows}x{self.ncols} by "
                             f"{other.nrows}x{other.ncols}")

    def __repr__(self) -> str:
        return f"RatMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"


def operator_norm(mat: RatMatrix | np.ndarray, iterations: int = 200) -> float:
    """Double-precision spectral norm; dense SVD below dimension 2000,
    power iteration on A*A above."""
    a = mat.to_numpy() if isinstance(mat, RatMatrix) else np.asarray(mat, dtype=float)
    if max(a.shape) <= 2000:
        return float(np.linalg.norm(a, 2)) if a.size else 0.0
    rng = np.random.default_rng(7)
    x = rng.standard_normal(a.shape[1])
    x /= np.linalg.norm(x)
    last = 0.0
    for _ in range(iterations):
        y = a.T @ (a @ x)
        norm = np.linalg.norm(y)
        if norm == 0:
            return 0.0
        x = y / norm
        if abs(norm - last) < 1e-12 * max(1.0, norm):
            break
        last = norm
    return float(np.sqrt(norm))
