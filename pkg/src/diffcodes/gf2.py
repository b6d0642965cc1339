"""Dense bit-packed linear algebra over GF(2).

Rows are stored as little-endian 64-bit words (bit ``c`` of a row lives in
word ``c >> 6`` at position ``c & 63``).  Padding bits beyond ``cols`` are
kept at zero, which every mutating routine preserves.

Covers rank / nullspace / products, brute-force code distance, and the
coset ("reduced") weight used for stabilizer codes, plus alist and raw
binary serialization.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np


def _n_words(cols: int) -> int:
    return max(1, (cols + 63) >> 6)


@dataclass
class BitMatrix:
    """A rows x cols binary matrix packed into uint64 words (row-major)."""

    rows: int
    cols: int
    data: np.ndarray  # shape (rows, n_words), dtype uint64

    def __post_init__(self):
        if self.data.shape != (self.rows, _n_words(self.cols)):
            raise ValueError(
                f"data shape {self.data.shape} does not match "
                f"{self.rows}x{self.cols}"
            )
        if self.data.dtype != np.uint64:
            raise ValueError("data must be uint64")

    # -- construction ------------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, np.zeros((rows, _n_words(cols)), dtype=np.uint64))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        m = cls.zeros(n, n)
        for i in range(n):
            m.set(i, i, 1)
        return m

    @classmethod
    def from_dense(cls, array) -> "BitMatrix":
        """Pack a 2-d 0/1 array."""
        a = np.asarray(array, dtype=np.uint8) & 1
        if a.ndim != 2:
            raise ValueError("expected a 2-d array")
        rows, cols = a.shape
        nw = _n_words(cols)
        padded = np.zeros((rows, nw * 64), dtype=np.uint8)
        padded[:, :cols] = a
        packed = np.packbits(padded, axis=1, bitorder="little")
        data = packed.view("<u8").reshape(rows, nw).astype(np.uint64)
        return cls(rows, cols, data)

    @classmethod
    def from_rows(cls, rows_support, cols: int) -> "BitMatrix":
        """Build from per-row lists of set column indices."""
        m = cls.zeros(len(rows_support), cols)
        for r, support in enumerate(rows_support):
            for c in support:
                m.set(r, int(c), 1)
        return m

    def to_dense(self) -> np.ndarray:
        raw = self.data.astype("<u8").view(np.uint8)
        bits = np.unpackbits(raw.reshape(self.rows, -1), axis=1, bitorder="little")
        return bits[:, : self.cols].copy()

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, self.data.copy())

    # -- element access ----------------------------------------------------

    def get(self, r: int, c: int) -> int:
        return int((self.data[r, c >> 6] >> np.uint64(c & 63)) & np.uint64(1))

    def set(self, r: int, c: int, value: int) -> None:
        mask = np.uint64(1) << np.uint64(c & 63)
        if value & 1:
            self.data[r, c >> 6] |= mask
        else:
            self.data[r, c >> 6] &= ~mask

    def row_support(self, r: int) -> np.ndarray:
        """Column indices set in row r."""
        return np.nonzero(self.to_dense()[r])[0] if self.cols else np.array([], int)

    def row_weight(self, r: int) -> int:
        return int(np.bitwise_count(self.data[r]).sum())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and bool(np.array_equal(self.data, other.data))
        )

    def is_zero(self) -> bool:
        return not self.data.any()

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)


# -- vectors ---------------------------------------------------------------


def pack_vector(bits, cols: int) -> np.ndarray:
    """Pack a 0/1 vector of length cols into uint64 words."""
    return BitMatrix.from_dense(np.asarray(bits, dtype=np.uint8).reshape(1, -1)).data[0]


def unpack_vector(words: np.ndarray, cols: int) -> np.ndarray:
    raw = words.astype("<u8").view(np.uint8)
    return np.unpackbits(raw, bitorder="little")[:cols].copy()


def vector_weight(words: np.ndarray) -> int:
    return int(np.bitwise_count(words).sum())


# -- elimination -----------------------------------------------------------


def _eliminate(data: np.ndarray, cols: int, reduced: bool):
    """In-place Gauss(-Jordan) elimination; returns pivot column list.

    First-nonzero pivoting; over GF(2) there is no tie-breaking ambiguity.
    """
    rows = data.shape[0]
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        w, b = c >> 6, np.uint64(c & 63)
        col_bits = (data[r:, w] >> b) & np.uint64(1)
        hits = np.nonzero(col_bits)[0]
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            data[[r, p]] = data[[p, r]]
        col_full = (data[:, w] >> b) & np.uint64(1)
        if reduced:
            targets = np.nonzero(col_full)[0]
            targets = targets[targets != r]
        else:
            below = np.nonzero(col_full[r + 1 :])[0]
            targets = below + r + 1
        if targets.size:
            data[targets] ^= data[r]
        pivots.append(c)
        r += 1
    return pivots


def rank(M: BitMatrix) -> int:
    """GF(2) row rank via Gaussian elimination; input unmodified."""
    work = M.data.copy()
    return len(_eliminate(work, M.cols, reduced=False))


def nullspace_dim(M: BitMatrix) -> int:
    """dim ker(M) = cols - rank(M)."""
    return M.cols - rank(M)


def rref(M: BitMatrix):
    """Reduced row echelon form; returns (BitMatrix, pivot columns)."""
    work = M.data.copy()
    pivots = _eliminate(work, M.cols, reduced=True)
    return BitMatrix(M.rows, M.cols, work), pivots


def row_space_basis(M: BitMatrix) -> BitMatrix:
    """Nonzero rows of the RREF: a basis of the row space of M."""
    R, pivots = rref(M)
    return BitMatrix(len(pivots), M.cols, R.data[: len(pivots)].copy())


def nullspace_basis(M: BitMatrix) -> BitMatrix:
    """Basis of ker(M), one kernel vector per non-pivot column."""
    R, pivots = rref(M)
    pivot_set = set(pivots)
    free_cols = [c for c in range(M.cols) if c not in pivot_set]
    dense = R.to_dense()
    basis = np.zeros((len(free_cols), M.cols), dtype=np.uint8)
    for i, fc in enumerate(free_cols):
        basis[i, fc] = 1
        for r, pc in enumerate(pivots):
            if dense[r, fc]:
                basis[i, pc] = 1
    return BitMatrix.from_dense(basis)


# -- products --------------------------------------------------------------


def product_with_transpose(A: BitMatrix, B: BitMatrix) -> BitMatrix:
    """A @ B^T over GF(2): entry (i, j) = parity(<A_i, B_j>)."""
    if A.cols != B.cols:
        raise ValueError(f"dimension mismatch: {A.cols} != {B.cols}")
    out = BitMatrix.zeros(A.rows, B.rows)
    for i in range(A.rows):
        parities = np.bitwise_count(A.data[i][None, :] & B.data).sum(axis=1) & 1
        out.data[i] = BitMatrix.from_dense(parities.reshape(1, -1).astype(np.uint8)).data[0]
    return out


def matmul(A: BitMatrix, B_transposed: BitMatrix) -> BitMatrix:
    """GF(2) product A @ B_transposed (the second argument is a plain
    matrix; the name reflects the common call site H_X @ H_Z^T where the
    caller already holds the transpose)."""
    if A.cols != B_transposed.rows:
        raise ValueError(
            f"dimension mismatch: {A.rows}x{A.cols} @ "
            f"{B_transposed.rows}x{B_transposed.cols}"
        )
    return product_with_transpose(A, B_transposed.transpose())


def matvec(M: BitMatrix, words: np.ndarray) -> np.ndarray:
    """M @ x for a packed vector x; returns a 0/1 array of length rows."""
    return (np.bitwise_count(M.data & words[None, :]).sum(axis=1) & 1).astype(np.uint8)


def syndrome_weight(M: BitMatrix, words: np.ndarray) -> int:
    return int(matvec(M, words).sum())


# -- brute-force distance and coset weight ---------------------------------

_SPAN_ENUM_MAX_DIM = 22


def _span_min_weight(basis: BitMatrix, offset: np.ndarray | None, w_max: int):
    """Minimum weight of (offset + v) over nonzero-or-all v in span(basis).

    With offset None: minimum over *nonzero* span elements (distance).
    With offset given: minimum over *all* span elements (coset weight).
    Enumerates by recursive doubling; dim must be <= _SPAN_ENUM_MAX_DIM.
    """
    dim = basis.rows
    if dim > _SPAN_ENUM_MAX_DIM:
        raise ValueError(f"span dimension {dim} exceeds enumeration cap")
    words = basis.data.shape[1]
    span = np.zeros((1, words), dtype=np.uint64)
    for i in range(dim):
        span = np.vstack([span, span ^ basis.data[i]])
    if offset is not None:
        span ^= offset[None, :]
        weights = np.bitwise_count(span).sum(axis=1)
    else:
        weights = np.bitwise_count(span).sum(axis=1)[1:]  # drop the zero vector
    if weights.size == 0:
        return None
    best = int(weights.min())
    return best if best <= w_max else None


def min_distance_bruteforce(H: BitMatrix, w_max: int):
    """Smallest weight <= w_max of a nonzero kernel element, else None."""
    if w_max > H.cols:
        raise ValueError("w_max exceeds the number of columns")
    kernel = nullspace_basis(H)
    if kernel.rows == 0:
        return None
    if kernel.rows <= _SPAN_ENUM_MAX_DIM:
        return _span_min_weight(kernel, None, w_max)
    # Kernel too big to enumerate: search low-weight words directly.
    from itertools import combinations

    for w in range(1, w_max + 1):
        for support in combinations(range(H.cols), w):
            vec = np.zeros(H.data.shape[1], dtype=np.uint64)
            for c in support:
                vec[c >> 6] ^= np.uint64(1) << np.uint64(c & 63)
            if not matvec(H, vec).any():
                return w
    return None


def reduced_weight_bruteforce(x, H_other: BitMatrix, w_max: int):
    """dist(x, rowspace(H_other)) if <= w_max, else None.

    Enumerates the row space when its dimension is small; otherwise runs a
    branch-and-bound over the RREF basis (both agree where both apply).
    """
    xw = np.asarray(x)
    if xw.dtype != np.uint64:
        xw = pack_vector(xw, H_other.cols)
    basis = row_space_basis(H_other)
    if basis.rows <= 20:
        best = _span_min_weight(basis, xw, max(w_max, 0))
        return best
    return _reduced_weight_bnb(xw, H_other, w_max)


def _reduced_weight_bnb(xw: np.ndarray, H_other: BitMatrix, w_max: int):
    """Branch-and-bound over RREF basis rows in pivot order.

    After deciding row i, the bit at pivot column p_i is final (later RREF
    rows are zero there), so settled pivot bits give an exact lower bound.
    """
    R, pivots = rref(H_other)
    dim = len(pivots)
    basis = R.data[:dim]
    best = [int(np.bitwise_count(xw).sum())]  # x itself is in the coset

    def settled_bit(vec, c):
        return int((vec[c >> 6] >> np.uint64(c & 63)) & np.uint64(1))

    def dfs(i, current, settled_weight):
        if settled_weight >= best[0]:
            return
        if i == dim:
            w = int(np.bitwise_count(current).sum())
            if w < best[0]:
                best[0] = w
            return
        p = pivots[i]
        for take in (0, 1):
            nxt = current ^ basis[i] if take else current
            dfs(i + 1, nxt, settled_weight + settled_bit(nxt, p))

    dfs(0, xw.copy(), 0)
    return best[0] if best[0] <= w_max else None


# -- serialization ----------------------------------------------------------


def write_alist(M: BitMatrix, path) -> None:
    """MacKay alist text format (1-indexed, zero-padded entries)."""
    dense = M.to_dense()
    n, m = M.cols, M.rows  # alist convention: columns first
    col_deg = dense.sum(axis=0).astype(int)
    row_deg = dense.sum(axis=1).astype(int)
    max_col = int(col_deg.max()) if n else 0
    max_row = int(row_deg.max()) if m else 0
    lines = [f"{n} {m}", f"{max_col} {max_row}"]
    lines.append(" ".join(str(d) for d in col_deg))
    lines.append(" ".join(str(d) for d in row_deg))
    for c in range(n):
        idx = (np.nonzero(dense[:, c])[0] + 1).tolist()
        idx += [0] * (max_col - len(idx))
        lines.append(" ".join(str(i) for i in idx))
    for r in range(m):
        idx = (np.nonzero(dense[r])[0] + 1).tolist()
        idx += [0] * (max_row - len(idx))
        lines.append(" ".join(str(i) for i in idx))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_alist(path) -> BitMatrix:
    """Read alist; accepts both zero-padded and unpadded entry lists."""
    with open(path) as fh:
        tokens = [int(t) for t in fh.read().split()]
    pos = 0

    def take():
        nonlocal pos
        v = tokens[pos]
        pos += 1
        return v

    n, m = take(), take()
    max_col, max_row = take(), take()
    col_deg = [take() for _ in range(n)]
    [take() for _ in range(m)]  # row degrees (redundant with the lists)
    remaining = len(tokens) - pos
    padded = remaining == n * max_col + m * max_row
    dense = np.zeros((m, n), dtype=np.uint8)
    for c in range(n):
        count = max_col if padded else col_deg[c]
        for _ in range(count):
            v = take()
            if v:
                dense[v - 1, c] = 1
    # Row lists are redundant; ignore the remainder.
    return BitMatrix.from_dense(dense)


def write_raw(M: BitMatrix, path) -> None:
    """Raw dense binary: two u64-LE dims, then packed rows (u64-LE words)."""
    with open(path, "wb") as fh:
        fh.write(struct.pack("<QQ", M.rows, M.cols))
        fh.write(M.data.astype("<u8").tobytes())


def read_raw(path) -> BitMatrix:
    with open(path, "rb") as fh:
        rows, cols = struct.unpack("<QQ", fh.read(16))
        nw = _n_words(cols)
        data = np.frombuffer(fh.read(rows * nw * 8), dtype="<u8").reshape(rows, nw)
    return BitMatrix(int(rows), int(cols), data.astype(np.uint64))
