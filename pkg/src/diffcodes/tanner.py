"""Bipartite multigraph between bits (left) and checks (right).

Edges carry multiplicity: the GF(2) parity-check matrix uses multiplicity
mod 2 (a bit wired twice to a check cancels), while neighbor/expansion
queries count distinct checks and unique-neighbor queries count incident
edges with multiplicity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .gf2 import BitMatrix


@dataclass
class TannerGraph:
    n_bits: int
    n_checks: int
    edge_bits: np.ndarray    # int64, one entry per edge (multiplicity kept)
    edge_checks: np.ndarray  # int64, parallel to edge_bits
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.edge_bits = np.asarray(self.edge_bits, dtype=np.int64)
        self.edge_checks = np.asarray(self.edge_checks, dtype=np.int64)
        if self.edge_bits.shape != self.edge_checks.shape:
            raise ValueError("edge arrays must be parallel")
        if self.edge_bits.size:
            if self.edge_bits.min() < 0 or self.edge_bits.max() >= self.n_bits:
                raise ValueError("bit index out of range")
            if self.edge_checks.min() < 0 or self.edge_checks.max() >= self.n_checks:
                raise ValueError("check index out of range")
        self._bit_adj = None
        self._check_adj = None

    @property
    def n_edges(self) -> int:
        return int(self.edge_bits.size)

    # -- adjacency ----------------------------------------------------------

    def _bit_csr(self):
        """(ptr, checks) with multiplicity, edges grouped by bit."""
        if self._bit_adj is None:
            order = np.argsort(self.edge_bits, kind="stable")
            counts = np.bincount(self.edge_bits, minlength=self.n_bits)
            ptr = np.zeros(self.n_bits + 1, dtype=np.int64)
            np.cumsum(counts, out=ptr[1:])
            self._bit_adj = (ptr, self.edge_checks[order])
        return self._bit_adj

    def _check_csr(self):
        if self._check_adj is None:
            order = np.argsort(self.edge_checks, kind="stable")
            counts = np.bincount(self.edge_checks, minlength=self.n_checks)
            ptr = np.zeros(self.n_checks + 1, dtype=np.int64)
            np.cumsum(counts, out=ptr[1:])
            self._check_adj = (ptr, self.edge_bits[order])
        return self._check_adj

    def bit_neighbors(self, bit: int) -> np.ndarray:
        """Checks incident to a bit, with multiplicity."""
        if not 0 <= bit < self.n_bits:
            raise IndexError(f"bit {bit} out of range")
        ptr, adj = self._bit_csr()
        return adj[ptr[bit]:ptr[bit + 1]]

    def check_neighbors(self, check: int) -> np.ndarray:
        if not 0 <= check < self.n_checks:
            raise IndexError(f"check {check} out of range")
        ptr, adj = self._check_csr()
        return adj[ptr[check]:ptr[check + 1]]

    # -- queries ------------------------------------------------------------

    def neighbor_set(self, bits) -> set:
        """Distinct checks adjacent to any bit in the set."""
        out = set()
        for b in bits:
            out.update(int(c) for c in self.bit_neighbors(int(b)))
        return out

    def unique_neighbor_set(self, bits) -> set:
        """Checks with exactly one incident edge (multiplicity counted)
        into the set."""
        counts = {}
        for b in bits:
            for c in self.bit_neighbors(int(b)):
                c = int(c)
                counts[c] = counts.get(c, 0) + 1
        return {c for c, k in counts.items() if k == 1}

    def check_neighbor_set(self, checks) -> set:
        """Distinct bits adjacent to any check in the set (right-side dual)."""
        out = set()
        for c in checks:
            out.update(int(b) for b in self.check_neighbors(int(c)))
        return out

    def check_unique_neighbor_set(self, checks) -> set:
        counts = {}
        for c in checks:
            for b in self.check_neighbors(int(c)):
                b = int(b)
                counts[b] = counts.get(b, 0) + 1
        return {b for b, k in counts.items() if k == 1}

    def degree_audit(self) -> dict:
        bit_deg = np.bincount(self.edge_bits, minlength=self.n_bits)
        check_deg = np.bincount(self.edge_checks, minlength=self.n_checks)
        max_bit = int(bit_deg.max()) if self.n_bits else 0
        max_check = int(check_deg.max()) if self.n_checks else 0
        biregular = bool(
            (bit_deg == max_bit).all() and (check_deg == max_check).all()
        )
        return {
            "max_bit_degree": max_bit,
            "max_check_degree": max_check,
            "is_biregular": biregular,
        }

    # -- matrices ------------------------------------------------------------

    def multiplicity_matrix(self) -> np.ndarray:
        """Dense (n_checks x n_bits) integer edge-multiplicity matrix."""
        mult = np.zeros((self.n_checks, self.n_bits), dtype=np.int32)
        np.add.at(mult, (self.edge_checks, self.edge_bits), 1)
        return mult

    def to_parity_check_matrix(self, mode: str = "parity") -> BitMatrix:
        """mode='parity': entries are multiplicity mod 2 (GF(2)-faithful);
        mode='simple': entry 1 iff multiplicity >= 1."""
        mult = self.multiplicity_matrix()
        if mode == "parity":
            dense = (mult & 1).astype(np.uint8)
        elif mode == "simple":
            dense = (mult >= 1).astype(np.uint8)
        else:
            raise ValueError(f"unknown mode {mode!r}")
        return BitMatrix.from_dense(dense)

    def reduced_adjacency(self, mode: str = "parity"):
        """CSR adjacency of the reduced simple graph, for decoders/dynamics.

        mode='parity': parallel edges of even multiplicity cancel (GF(2));
        mode='simple': parallel edges coalesce into one.  Returns
        (bit_ptr, bit_checks, check_ptr, check_bits).
        """
        pair = self.edge_checks * self.n_bits + self.edge_bits
        uniq, counts = np.unique(pair, return_counts=True)
        if mode == "parity":
            keep = uniq[counts % 2 == 1]
        elif mode == "simple":
            keep = uniq
        else:
            raise ValueError(f"unknown mode {mode!r}")
        checks = (keep // self.n_bits).astype(np.int64)
        bits = (keep % self.n_bits).astype(np.int64)

        order = np.argsort(bits, kind="stable")
        bit_ptr = np.zeros(self.n_bits + 1, dtype=np.int64)
        np.cumsum(np.bincount(bits, minlength=self.n_bits), out=bit_ptr[1:])
        bit_checks = checks[order].astype(np.int32)

        order = np.argsort(checks, kind="stable")
        check_ptr = np.zeros(self.n_checks + 1, dtype=np.int64)
        np.cumsum(np.bincount(checks, minlength=self.n_checks), out=check_ptr[1:])
        check_bits = bits[order].astype(np.int32)
        return bit_ptr, bit_checks, check_ptr, check_bits

    def parity_adjacency(self):
        return self.reduced_adjacency("parity")

    # -- serialization --------------------------------------------------------

    def save(self, prefix) -> None:
        """Write <prefix>.json (metadata), <prefix>.alist (parity-mode
        matrix) and <prefix>.edges (multiplicity-preserving edge list)."""
        from .gf2 import write_alist

        prefix = str(prefix)
        meta = {
            "n_bits": self.n_bits,
            "n_checks": self.n_checks,
            "n_edges": self.n_edges,
            "degree_audit": self.degree_audit(),
            "provenance": _jsonable(self.provenance),
        }
        with open(prefix + ".json", "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
        write_alist(self.to_parity_check_matrix("parity"), prefix + ".alist")
        with open(prefix + ".edges", "w") as fh:
            for b, c in zip(self.edge_bits, self.edge_checks):
                fh.write(f"{b} {c}\n")

    @classmethod
    def load(cls, prefix) -> "TannerGraph":
        prefix = str(prefix)
        with open(prefix + ".json") as fh:
            meta = json.load(fh)
        bits, checks = [], []
        with open(prefix + ".edges") as fh:
            for line in fh:
                b, c = line.split()
                bits.append(int(b))
                checks.append(int(c))
        return cls(
            meta["n_bits"], meta["n_checks"],
            np.array(bits, dtype=np.int64), np.array(checks, dtype=np.int64),
            provenance=meta.get("provenance", {}),
        )


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value
