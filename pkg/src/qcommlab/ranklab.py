"""Communication matrices and rank machinery.

Covers the standard two-party functions (EQ, NEQ, DISJ, INT), witness
matrices whose nonzero pattern certifies a function's 1-set, structural
full-rank audits for EQ and DISJ, randomized scalarization of vector
families into low-rank witnesses, and the diagonal-restriction polynomial
toolchain for acceptance matrices that depend on x AND y bitwise.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import engine, linalg
from .errors import (FamilyHypothesisError, PatternMismatchError,
                     ProbabilisticFailureError)

FUNCTION_NAMES = ("EQ", "NEQ", "DISJ", "INT")

COMM_N_GUARD = 10

SCALARIZE_RETRY_BUDGET = 32


@dataclass(frozen=True)
class CommMatrix:
    """0/1 table of a two-party boolean function over all input pairs."""

    n: int
    name: str
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (1 << self.n, 1 << self.n):
            raise ValueError("values shape does not match n")
        if not np.all((v == 0) | (v == 1)):
            raise ValueError("entries must be 0/1")
        object.__setattr__(self, "values", v.astype(np.uint8))

    def to_csv(self) -> str:
        return "\n".join(",".join(str(int(v)) for v in row)
                         for row in self.values) + "\n"

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "values": self.values.tolist()})


def build_comm_matrix(name: str, n: int) -> CommMatrix:
    if n < 1 or n > COMM_N_GUARD:
        raise ValueError(f"n must be in 1..{COMM_N_GUARD}")
    dim = 1 << n
    xs = np.arange(dim)[:, None]
    ys = np.arange(dim)[None, :]
    if name == "EQ":
        v = (xs == ys)
    elif name == "NEQ":
        v = (xs != ys)
    elif name == "INT":
        v = (xs & ys) != 0
    elif name == "DISJ":
        v = (xs & ys) == 0
    else:
        raise ValueError(f"unknown function {name!r}")
    return CommMatrix(n=n, name=name, values=v.astype(np.uint8))


def canonical_witness(name: str, n: int) -> np.ndarray:
    """A concrete matrix whose nonzero pattern is the function's 1-set.

    EQ uses the identity; NEQ uses x - y (rank 2); INT counts common ones
    (rank n, row 0 all zero); DISJ uses its own 0/1 table, which is full
    rank by the complement-pairing triangular ordering.
    """
    dim = 1 << n
    xs = np.arange(dim)[:, None]
    ys = np.arange(dim)[None, :]
    if name == "EQ":
        return np.eye(dim)
    if name == "NEQ":
        return (xs - ys).astype(float)
    if name == "INT":
        common = np.bitwise_and(xs, ys)
        return np.vectorize(lambda v: float(bin(v).count("1")))(common)
    if name == "DISJ":
        return build_comm_matrix("DISJ", n).values.astype(float)
    raise ValueError(f"unknown function {name!r}")


def _nonzero_pattern(m: np.ndarray, tol: float) -> np.ndarray:
    scale = np.max(np.abs(m))
    if scale == 0:
        return np.zeros(m.shape, dtype=bool)
    return np.abs(m) > tol * scale


@dataclass(frozen=True)
class NdetWitness:
    matrix: np.ndarray
    target: CommMatrix
    rank: int
    tol: float

    def to_json(self) -> str:
        return json.dumps({
            "target": self.target.name,
            "n": self.target.n,
            "rank": self.rank,
            "pattern_ok": True,
            "counterexamples": [],
        })


def verify_ndet_witness(m, target: CommMatrix,
                        tol: float = linalg.DEFAULT_TOL) -> NdetWitness:
    """Accept m as a witness for target, or reject with counterexamples."""
    m = np.asarray(m)
    if m.shape != target.values.shape:
        raise ValueError("witness shape does not match the target table")
    pattern = _nonzero_pattern(m, tol)
    mism = np.argwhere(pattern != (target.values == 1))
    if mism.size:
        raise PatternMismatchError(
            f"{len(mism)} entries disagree with {target.name}_{target.n}",
            [(int(x), int(y)) for x, y in mism])
    return NdetWitness(matrix=m, target=target,
                       rank=linalg.numeric_rank(m, tol), tol=tol)


@dataclass
class AuditReport:
    name: str
    n: int
    trials: int
    ok: bool
    failures: list = field(default_factory=list)
    detail: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({
            "audit": self.name, "n": self.n, "trials": self.trials,
            "ok": self.ok, "failures": self.failures, "detail": self.detail,
        })


def eq_fullrank_audit(n: int, trials: int, seed: int) -> AuditReport:
    """Random matrices with the EQ nonzero pattern must have full rank."""
    if n > 8:
        raise ValueError("n > 8 not supported by this audit")
    dim = 1 << n
    rng = np.random.default_rng(seed)
    failures = []
    for t in range(trials):
        diag = rng.uniform(0.5, 1.5, size=dim) * rng.choice([-1.0, 1.0], size=dim)
        m = np.diag(diag)
        rank = linalg.numeric_rank(m)
        if rank != dim or (n <= 5 and linalg.exact_rank(m) != dim):
            failures.append({"trial": t, "rank": rank})
    return AuditReport(name="eq-fullrank", n=n, trials=trials,
                       ok=not failures, failures=failures,
                       detail={"expected_rank": dim})


def disj_ordering(n: int):
    """Row/column orders that upper-triangularize the DISJ pattern.

    Rows are inputs x sorted by (popcount, value); column j is the
    complement of row j.  Diagonal pairs (x, ~x) are disjoint, and
    x_i being a subset of x_j forces i <= j, so everything strictly
    below the diagonal is a 0 of DISJ.
    """
    mask = (1 << n) - 1
    rows = sorted(range(1 << n), key=lambda x: (bin(x).count("1"), x))
    cols = [x ^ mask for x in rows]
    return rows, cols


def disj_triangular_audit(n: int, trials: int, seed: int) -> AuditReport:
    if n > 8:
        raise ValueError("n > 8 not supported by this audit")
    dim = 1 << n
    disj = build_comm_matrix("DISJ", n).values
    rows, cols = disj_ordering(n)
    failures = []
    for i in range(dim):
        if rows[i] & cols[i]:
            failures.append({"kind": "diagonal", "i": i})
        for j in range(i):
            if disj[rows[i], cols[j]]:
                failures.append({"kind": "below-diagonal", "i": i, "j": j})
    rng = np.random.default_rng(seed)
    for t in range(trials):
        m = disj * rng.uniform(0.5, 1.5, size=(dim, dim))
        rank = linalg.numeric_rank(m)
        if rank != dim or (n <= 5 and linalg.exact_rank(m) != dim):
            failures.append({"kind": "rank", "trial": t, "rank": rank})
    return AuditReport(name="disj-triangular", n=n, trials=trials,
                       ok=not failures, failures=failures,
                       detail={"expected_rank": dim})


@dataclass
class ScalarizationTrial:
    m: int
    coeff_bits: int
    alpha: np.ndarray
    beta: np.ndarray
    a_table: np.ndarray
    b_table: np.ndarray
    v_table: np.ndarray
    success: bool
    attempt: int
    witness: Optional[NdetWitness]
    predicted_failure_bound: float


def _family_hypothesis_check(a_family, b_family, target, tol):
    """Sum_i A_i(x) (x) B_i(y) must vanish exactly on target's 0-set."""
    m, nx, da = a_family.shape
    _, ny, db = b_family.shape
    norms = np.zeros((nx, ny))
    for xi in range(nx):
        for yi in range(ny):
            total = np.zeros(da * db, dtype=complex)
            for i in range(m):
                total += np.kron(a_family[i, xi], b_family[i, yi])
            norms[xi, yi] = np.linalg.norm(total)
    pattern = _nonzero_pattern(norms, tol)
    if not np.array_equal(pattern, target.values == 1):
        bad = np.argwhere(pattern != (target.values == 1))
        raise FamilyHypothesisError(
            "family tensor sums do not vanish exactly on the 0-set; "
            f"first offender (x,y) = {tuple(int(v) for v in bad[0])}")


def lemma2_scalarize(a_family, b_family, target: CommMatrix,
                     coeff_bits: int = 24, seed: int = 0,
                     tol: float = linalg.DEFAULT_TOL) -> ScalarizationTrial:
    """Collapse vector families to scalars with random coefficients.

    Given families with sum_i A_i(x) (x) B_i(y) = 0 iff target(x,y) = 0,
    draws coefficient vectors alpha, beta from 2^coeff_bits equally spaced
    values in [1, 2) and forms v(x,y) = sum_i (alpha.A_i(x))(beta.B_i(y)).
    The zero pattern of v matches the target with high probability; the
    resulting witness has rank at most the family size m.
    """
    a_family = np.asarray(a_family, dtype=complex)
    b_family = np.asarray(b_family, dtype=complex)
    if a_family.ndim != 3 or b_family.ndim != 3:
        raise ValueError("families must be [m, 2^n, dim] arrays")
    m = a_family.shape[0]
    if b_family.shape[0] != m:
        raise ValueError("family sizes disagree")
    _family_hypothesis_check(a_family, b_family, target, tol)
    size = 1 << coeff_bits
    ones = int(np.sum(target.values))
    predicted = min(1.0, ones * 2.0 / size)
    last = None
    for attempt in range(SCALARIZE_RETRY_BUDGET):
        rng = np.random.default_rng([seed, attempt])
        alpha = 1.0 + rng.integers(0, size, size=a_family.shape[2]) / size
        beta = 1.0 + rng.integers(0, size, size=b_family.shape[2]) / size
        a_table = a_family @ alpha
        b_table = b_family @ beta
        v = np.einsum("ix,iy->xy", a_table, b_table)
        success = np.array_equal(_nonzero_pattern(v, tol),
                                 target.values == 1)
        witness = verify_ndet_witness(v, target, tol) if success else None
        last = ScalarizationTrial(
            m=m, coeff_bits=coeff_bits, alpha=alpha, beta=beta,
            a_table=a_table, b_table=b_table, v_table=v, success=success,
            attempt=attempt, witness=witness,
            predicted_failure_bound=predicted)
        if success:
            return last
    raise ProbabilisticFailureError(
        f"no pattern match in {SCALARIZE_RETRY_BUDGET} attempts "
        f"(per-attempt failure bound {predicted:.3g})")


def protocol_to_witness(p: engine.Protocol, target: CommMatrix,
                        seed: int = 0, coeff_bits: int = 24,
                        tol: float = linalg.DEFAULT_TOL) -> NdetWitness:
    """Low-rank witness extracted from a protocol's accepting transcripts.

    The protocol must accept with positive probability exactly on the
    target's 1-set.  Transcript components with the output bit 1 give
    families A_i(x), B_i(y); the accepting set S has size at most
    2^(cost-1), so the witness rank is at most 2^(cost-1).
    """
    n = p.input_bits
    if n != target.n:
        raise ValueError("protocol and target disagree on n")
    accept = engine.acceptance_matrix(p)
    if not np.array_equal(_nonzero_pattern(accept.values, tol),
                          target.values == 1):
        raise ValueError(
            "protocol acceptance pattern does not compute the target")
    dim = 1 << n
    count = 1 << p.declared_cost
    a_tab = b_tab = None
    for xi in range(dim):
        a1, _, _ = engine.yao_kremer_decompose(p, xi, 0).output_components()
        if a_tab is None:
            a_tab = np.zeros((count, dim, a1.shape[1]), dtype=complex)
        a_tab[:, xi, :] = a1
    for yi in range(dim):
        _, b1, _ = engine.yao_kremer_decompose(p, 0, yi).output_components()
        if b_tab is None:
            b_tab = np.zeros((count, dim, b1.shape[1]), dtype=complex)
        b_tab[:, yi, :] = b1
    a_norm = np.linalg.norm(a_tab, axis=(1, 2))
    b_norm = np.linalg.norm(b_tab, axis=(1, 2))
    live = (a_norm > tol * max(a_norm.max(), 1e-300)) \
        & (b_norm > tol * max(b_norm.max(), 1e-300))
    s_idx = np.flatnonzero(live)
    if s_idx.size == 0:
        raise ValueError("protocol never accepts; no witness family")
    trial = lemma2_scalarize(a_tab[s_idx], b_tab[s_idx], target,
                             coeff_bits=coeff_bits, seed=seed, tol=tol)
    return trial.witness


def is_and_dependent(p: engine.AcceptanceMatrix,
                     tol: float = linalg.DEFAULT_TOL) -> bool:
    """True when P(x,y) is a function of the bitwise AND of the inputs."""
    dim = 1 << p.n
    seen = {}
    for xi in range(dim):
        for yi in range(dim):
            key = xi & yi
            if key in seen:
                if abs(seen[key] - p.values[xi, yi]) > tol:
                    return False
            else:
                seen[key] = p.values[xi, yi]
    return True


@dataclass(frozen=True)
class FoldedPolynomial:
    """Multilinear polynomial with one coefficient per variable subset.

    coeffs[S] is indexed by the subset bitmask in the same
    most-significant-first bit convention as the inputs.
    """

    n: int
    coeffs: np.ndarray

    def evaluate(self, z: int) -> float:
        total = 0.0
        s = int(z)
        # iterate over submasks of z
        sub = s
        while True:
            total += self.coeffs[sub]
            if sub == 0:
                break
            sub = (sub - 1) & s
        return total

    def monomial_count(self, tol: float = linalg.DEFAULT_TOL) -> int:
        scale = np.max(np.abs(self.coeffs))
        if scale == 0:
            return 0
        return int(np.sum(np.abs(self.coeffs) > tol * scale))


def fold_to_polynomial(p: engine.AcceptanceMatrix,
                       tol: float = linalg.DEFAULT_TOL) -> FoldedPolynomial:
    """Restrict P to the diagonal g(z) = P(z,z) and expand in monomials.

    Requires an AND-dependent matrix; the coefficients come from the
    subset Moebius transform of g.
    """
    if not is_and_dependent(p, tol):
        raise ValueError("acceptance matrix is not a function of x AND y")
    dim = 1 << p.n
    c = np.array([p.values[z, z] for z in range(dim)], dtype=float)
    for b in range(p.n):
        bit = 1 << b
        for mask in range(dim):
            if mask & bit:
                c[mask] -= c[mask ^ bit]
    poly = FoldedPolynomial(n=p.n, coeffs=c)
    for z in range(dim):
        if abs(poly.evaluate(z) - p.values[z, z]) > 1e-9:
            raise ValueError("transform failed to reproduce the diagonal")
    return poly


class MonomialRankReport(NamedTuple):
    monomials: int
    rank: int
    ok: bool


def monomial_rank_audit(p: engine.AcceptanceMatrix,
                        tol: float = linalg.DEFAULT_TOL) -> MonomialRankReport:
    """The monomial count of the folded polynomial equals rank(P)."""
    poly = fold_to_polynomial(p, tol)
    monomials = poly.monomial_count(tol)
    rank = linalg.numeric_rank(p.values, tol)
    return MonomialRankReport(monomials=monomials, rank=rank,
                              ok=monomials == rank)


@dataclass(frozen=True)
class NorApproxReport:
    ok: bool
    max_error: float
    eps: float
    monomials: int
    predicted_monomial_lower_bound: float

    def to_json(self) -> str:
        return json.dumps({
            "ok": self.ok, "max_error": self.max_error, "eps": self.eps,
            "monomials": self.monomials,
            "predicted_monomial_lower_bound":
                self.predicted_monomial_lower_bound,
        })


def nor_approx_audit(poly: FoldedPolynomial, eps: float) -> NorApproxReport:
    """Does the polynomial eps-approximate NOR on every 0/1 point?

    The 2^sqrt(n/12) monomial lower bound for such approximations is
    reported alongside, never asserted at these sizes.
    """
    max_err = 0.0
    for z in range(1 << poly.n):
        want = 1.0 if z == 0 else 0.0
        max_err = max(max_err, abs(poly.evaluate(z) - want))
    return NorApproxReport(
        ok=max_err <= eps, max_error=max_err, eps=eps,
        monomials=poly.monomial_count(),
        predicted_monomial_lower_bound=2.0 ** math.sqrt(poly.n / 12.0))


def random_and_dependent_acceptance(n: int, rng) -> engine.AcceptanceMatrix:
    """Random P(x,y) = g(x AND y) with g drawn from {0, 1/8, ..., 1}."""
    dim = 1 << n
    g = rng.integers(0, 9, size=dim) / 8.0
    xs = np.arange(dim)[:, None]
    ys = np.arange(dim)[None, :]
    return engine.AcceptanceMatrix(n=n, values=g[xs & ys])
