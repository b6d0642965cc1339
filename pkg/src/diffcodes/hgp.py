"""Hypergraph product of a Tanner graph with itself: CSS code pair.

Qubits are indexed L x L block first (row-major), then R x R; X-checks
row-major over L x R, Z-checks over R x L.  In block-matrix form
H_X = [I (x) H | H^T (x) I] and H_Z = [H (x) I | I (x) H^T], built here
from the parity-mode (multiplicity mod 2) matrix of the input graph.
The CSS identity H_X H_Z^T = 0 is verified, never assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .expansion import ExpansionReport, _as_fraction
from .gf2 import (BitMatrix, pack_vector, matvec, product_with_transpose,
                  reduced_weight_bruteforce)
from .tanner import TannerGraph

_DENSE_LIMIT = 40_000_000  # max rows*cols for materializing a BitMatrix


@dataclass
class CssCode:
    n_qubits: int
    x_check_qubits: list       # per X-check sorted qubit index arrays
    z_check_qubits: list
    provenance: dict = field(default_factory=dict)
    _hx: BitMatrix | None = None
    _hz: BitMatrix | None = None

    @property
    def n_x_checks(self) -> int:
        return len(self.x_check_qubits)

    @property
    def n_z_checks(self) -> int:
        return len(self.z_check_qubits)

    def _materialize(self, rows) -> BitMatrix:
        if len(rows) * self.n_qubits > _DENSE_LIMIT:
            raise ValueError("instance too large for a dense matrix")
        return BitMatrix.from_rows(rows, self.n_qubits)

    @property
    def H_X(self) -> BitMatrix:
        if self._hx is None:
            self._hx = self._materialize(self.x_check_qubits)
        return self._hx

    @property
    def H_Z(self) -> BitMatrix:
        if self._hz is None:
            self._hz = self._materialize(self.z_check_qubits)
        return self._hz

    def max_qubit_degree(self) -> int:
        deg = np.zeros(self.n_qubits, dtype=np.int64)
        for rows in (self.x_check_qubits, self.z_check_qubits):
            for q in rows:
                np.add.at(deg, q, 1)
        return int(deg.max())

    def max_sector_qubit_degree(self) -> int:
        """Max qubit degree within a single sector."""
        worst = 0
        for rows in (self.x_check_qubits, self.z_check_qubits):
            deg = np.zeros(self.n_qubits, dtype=np.int64)
            for q in rows:
                np.add.at(deg, q, 1)
            worst = max(worst, int(deg.max()))
        return worst

    def max_check_degree(self) -> int:
        return max(
            max((len(q) for q in self.x_check_qubits), default=0),
            max((len(q) for q in self.z_check_qubits), default=0),
        )


def hypergraph_product(B: TannerGraph, mode: str = "parity") -> CssCode:
    """Self-product of a Tanner graph, built from its reduced binary
    matrix (parity by default; 'simple' uses the biadjacency support)."""
    H = B.to_parity_check_matrix(mode).to_dense()
    m, n = H.shape
    check_bits = [np.nonzero(H[r])[0] for r in range(m)]   # bits of check r
    bit_checks = [np.nonzero(H[:, c])[0] for c in range(n)]  # checks of bit c
    n_qubits = n * n + m * m

    def q_ll(a1, a2):
        return a1 * n + a2

    def q_rr(b1, b2):
        return n * n + b1 * m + b2

    x_rows = []
    for alpha in range(n):          # X-check (alpha, beta) = alpha*m + beta
        for beta in range(m):
            qs = [q_ll(alpha, a) for a in check_bits[beta]]
            qs += [q_rr(b, beta) for b in bit_checks[alpha]]
            x_rows.append(np.array(sorted(qs), dtype=np.int64))
    z_rows = []
    for b in range(m):              # Z-check (b, a) = b*n + a
        for a in range(n):
            qs = [q_ll(alpha, a) for alpha in check_bits[b]]
            qs += [q_rr(b, beta) for beta in bit_checks[a]]
            z_rows.append(np.array(sorted(qs), dtype=np.int64))

    code = CssCode(
        n_qubits, x_rows, z_rows,
        provenance={
            "input_n": n, "input_m": m, "input_mode": mode,
            "input_provenance": dict(B.provenance),
        },
    )
    if not css_validate(code):
        raise AssertionError("hypergraph product violated the CSS identity")
    return code


def css_validate(c: CssCode) -> bool:
    """True iff H_X H_Z^T = 0 over GF(2), computed sparsely: for each
    X-check, parities of qubit-overlap with every touching Z-check."""
    z_of_qubit = [[] for _ in range(c.n_qubits)]
    for j, qs in enumerate(c.z_check_qubits):
        for q in qs:
            z_of_qubit[q].append(j)
    for qs in c.x_check_qubits:
        overlap = {}
        for q in qs:
            for j in z_of_qubit[q]:
                overlap[j] = overlap.get(j, 0) ^ 1
        if any(overlap.values()):
            return False
    return True


def css_validate_dense(c: CssCode) -> bool:
    """Dense-route verification of the same identity (small instances)."""
    return product_with_transpose(c.H_X, c.H_Z).is_zero()


def css_k(c: CssCode) -> int:
    """Number of logical qubits: n - rank(H_X) - rank(H_Z)."""
    from .gf2 import rank

    return c.n_qubits - rank(c.H_X) - rank(c.H_Z)


def quantum_confinement_audit(c: CssCode, delta: int, gamma, w_max: int,
                              sector: str = "Z") -> ExpansionReport:
    """Exhaustive boundary-confinement audit on a small instance.

    Enumerates errors x of weight <= w_max; computes the reduced weight
    ||x|| (distance from the stabilizer image of the *same-type* checks)
    and verifies ||x|| <= delta implies |H_other x| >= gamma ||x||.
    sector='Z' audits X-type errors checked by H_Z (reduced modulo
    im(H_X^T)); sector='X' the converse.
    """
    gamma = _as_fraction(gamma)
    if sector == "Z":
        H_syn, H_stab = c.H_Z, c.H_X
    elif sector == "X":
        H_syn, H_stab = c.H_X, c.H_Z
    else:
        raise ValueError("sector must be 'X' or 'Z'")
    worst_ratio = None
    worst_set = ()
    checked = 0
    certified = True
    for w in range(1, w_max + 1):
        for support in combinations(range(c.n_qubits), w):
            checked += 1
            x = np.zeros(c.n_qubits, dtype=np.uint8)
            x[list(support)] = 1
            xw = pack_vector(x, c.n_qubits)
            red = reduced_weight_bruteforce(xw, H_stab, w_max=w)
            if red is None or red == 0:
                continue  # a stabilizer (or beyond scope): vacuous
            if red > delta:
                continue
            syn = int(matvec(H_syn, xw).sum())
            ratio = Fraction(syn, red)
            if worst_ratio is None or ratio < worst_ratio or (
                    ratio == worst_ratio and tuple(support) < worst_set):
                worst_ratio = ratio
                worst_set = tuple(support)
            if ratio < gamma:
                certified = False
    report = ExpansionReport(
        delta_tested=delta, gamma_target=gamma, mode="exhaustive",
        certified=certified, worst_set=worst_set, worst_ratio=worst_ratio,
        n_sets_checked=checked, kind=f"quantum_confinement_{sector}",
    )
    return report


def save_css(c: CssCode, prefix) -> None:
    """Two alist files plus JSON metadata (layout, provenance, counts)."""
    import json

    from .gf2 import write_alist

    prefix = str(prefix)
    write_alist(c.H_X, prefix + ".hx.alist")
    write_alist(c.H_Z, prefix + ".hz.alist")
    meta = {
        "n_qubits": c.n_qubits,
        "n_x_checks": c.n_x_checks,
        "n_z_checks": c.n_z_checks,
        "qubit_layout": "LL block row-major, then RR block row-major",
        "check_layout": "X-checks row-major over LxR; Z-checks over RxL",
        "provenance": _plain(c.provenance),
    }
    with open(prefix + ".json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)


def _plain(value):
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    return value
