"""Concrete protocols and search routines.

* trivial_exact_protocol: send x, compute f reversibly, cost n+1.
* ndet_svd_protocol: one-round protocol from the SVD of the witness
  matrix transpose; cost ceil(log2 rank) + 1 and acceptance probability
  c_x^2 |m_xy|^2.
* qsearch: amplitude amplification with the growing random-cutoff
  schedule for an unknown number of solutions.
* bcw_intersection / recursive_intersection: find a common 1-index of
  two bit strings with one-sided error, with instrumented communication
  cost, plus the closed-form cost model for the recursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import engine, linalg
from .engine import ALICE, BOB, Gate, Protocol, ProtocolStep, RegisterLayout
from .ranklab import CommMatrix

H1 = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
X1 = np.array([[0.0, 1.0], [1.0, 0.0]])


def _bit_list(v) -> list:
    if isinstance(v, str):
        bits = [int(c) for c in v]
    else:
        bits = [int(b) for b in v]
    if any(b not in (0, 1) for b in bits):
        raise ValueError("inputs must be 0/1 sequences")
    return bits


def _flip_if_equal(n_controls: int, pattern: int) -> np.ndarray:
    """Permutation on (controls..., target): flip target iff controls == pattern."""
    dim = 1 << (n_controls + 1)
    u = np.zeros((dim, dim))
    for c in range(1 << n_controls):
        flip = 1 if c == pattern else 0
        for t in range(2):
            u[(c << 1) | (t ^ flip), (c << 1) | t] = 1.0
    return u


def trivial_exact_protocol(f: CommMatrix) -> Protocol:
    """Alice sends x verbatim; Bob computes f(x,y) into the output bit."""
    n = f.n
    lay = RegisterLayout(alice_qubits=0, channel_qubits=n + 1, bob_qubits=0)
    msg = tuple(range(1, n + 1))
    table = f.values

    def alice(xbits):
        return [Gate(X1, (lay.channel_qubit(i + 1),))
                for i, b in enumerate(xbits) if b]

    def bob(ybits):
        yi = engine.bits_to_int(ybits)
        dim = 1 << (n + 1)
        u = np.zeros((dim, dim))
        for c in range(1 << n):
            flip = int(table[c, yi])
            for t in range(2):
                u[(c << 1) | (t ^ flip), (c << 1) | t] = 1.0
        targets = tuple(lay.channel_qubit(i + 1) for i in range(n))
        return [Gate(u, targets + (lay.channel_qubit(0),))]

    return Protocol(lay, (ProtocolStep(ALICE, msg, alice),
                          ProtocolStep(BOB, (0,), bob)), input_bits=n)


@dataclass(frozen=True)
class NdetProtocolBundle:
    protocol: Protocol
    source_matrix: np.ndarray
    r: int
    per_row_norm: np.ndarray


def ndet_svd_protocol(m, tol: float = linalg.DEFAULT_TOL) -> NdetProtocolBundle:
    """One-round protocol accepting with probability c_x^2 |m_xy|^2.

    Factor m^T = u diag(s) v; Alice sends the first 2^q amplitudes of
    c_x * diag(s) v |x> on q = ceil(log2 r) qubits, Bob rotates by u on
    his register and flips the output bit at |y>.  Rows of m that are all
    zero have no unit state: Alice sends the all-zeros string instead and
    cleans the output bit with a zero-length follow-up turn, so those
    rows reject with certainty at unchanged cost.
    """
    m = np.asarray(m, dtype=complex)
    dim = m.shape[0]
    if m.ndim != 2 or m.shape[1] != dim or dim & (dim - 1):
        raise ValueError("matrix must be square with power-of-two size")
    n = dim.bit_length() - 1
    res = linalg.svd(m.T)
    s = res.sigma.copy()
    r = linalg.numeric_rank(m, tol)
    if r == 0:
        lay = RegisterLayout(alice_qubits=0, channel_qubits=1, bob_qubits=0)
        return NdetProtocolBundle(Protocol(lay, (), input_bits=n), m, 0,
                                  np.zeros(dim))
    s[r:] = 0.0
    phi_raw = (s[:, None] * res.v)  # column x = diag(s) v |x>
    row_norms = np.linalg.norm(phi_raw, axis=0)
    dead = row_norms <= tol * row_norms.max()
    c = np.zeros(dim)
    c[~dead] = 1.0 / row_norms[~dead]
    q = max(int(math.ceil(math.log2(r))), 0)
    lay = RegisterLayout(alice_qubits=1 if dead.any() else 0,
                         channel_qubits=1 + q, bob_qubits=n)
    msg = tuple(range(1, q + 1))
    msg_glob = tuple(lay.channel_qubit(k) for k in msg)
    bob_reg = lay.bob_register
    u_full = res.u

    def alice_send(xbits):
        xi = engine.bits_to_int(xbits)
        if dead[xi] or q == 0:
            return []
        phi = (c[xi] * phi_raw[:1 << q, xi]).astype(complex)
        return [Gate(linalg.unitary_with_first_column(phi), msg_glob)]

    def bob_reply(ybits):
        yi = engine.bits_to_int(ybits)
        gates = []
        swap = np.eye(4)[[0, 2, 1, 3]]
        for i in range(q):
            # message qubit i -> low bits of Bob's register
            gates.append(Gate(swap, (msg_glob[i], bob_reg[n - q + i])))
        if n:
            gates.append(Gate(u_full, bob_reg))
        gates.append(Gate(_flip_if_equal(n, yi),
                          bob_reg + (lay.channel_qubit(0),)))
        return gates

    steps = [ProtocolStep(ALICE, msg, alice_send),
             ProtocolStep(BOB, (0,), bob_reply)]
    if dead.any():
        swap_out = np.eye(4)[[0, 2, 1, 3]]

        def alice_clean(xbits):
            if dead[engine.bits_to_int(xbits)]:
                # move the (possibly 1) output bit into the fresh ancilla
                return [Gate(swap_out, (0, lay.channel_qubit(0)))]
            return []

        steps.append(ProtocolStep(ALICE, (), alice_clean))
    return NdetProtocolBundle(Protocol(lay, tuple(steps), input_bits=n),
                              m, r, c)


@dataclass(frozen=True)
class QSearchConfig:
    rng_seed: int
    schedule_growth: float = 1.2
    max_applications: Optional[int] = None

    def __post_init__(self):
        if not 1.0 < self.schedule_growth <= 2.0:
            raise ValueError("schedule_growth must be in (1, 2]")
        if self.max_applications is not None and self.max_applications < 1:
            raise ValueError("max_applications must be >= 1")

    def budget_for(self, dim: int) -> int:
        if self.max_applications is not None:
            return self.max_applications
        return int(math.ceil(9.0 * math.sqrt(dim)))


def _solution_mask(predicate, dim: int) -> np.ndarray:
    mask = np.zeros(dim, dtype=bool)
    if callable(predicate):
        for z in range(dim):
            mask[z] = bool(predicate(z))
    else:
        for z in predicate:
            mask[int(z)] = True
    return mask


def grover_state(prepare: np.ndarray, solutions, iterations: int) -> np.ndarray:
    """State after the given number of amplification iterations."""
    prepare = np.asarray(prepare, dtype=complex)
    psi0 = prepare[:, 0]
    mask = _solution_mask(solutions, psi0.shape[0])
    state = psi0.copy()
    for _ in range(iterations):
        state = state.copy()
        state[mask] *= -1.0
        state = 2.0 * np.vdot(psi0, state) * psi0 - state
    return state


@dataclass(frozen=True)
class QSearchResult:
    outcome: Optional[int]
    iterations: int
    measurements: int


def qsearch(prepare: np.ndarray, predicate, cfg: QSearchConfig) -> QSearchResult:
    """Search with the growing random-cutoff schedule, seeded.

    Returns a basis state satisfying the predicate (never a non-solution)
    or none once the application budget is spent; with at least one
    solution the overall success probability is >= 1/2 for any budget
    covering the O(sqrt(dim/solutions)) schedule.
    """
    prepare = np.asarray(prepare, dtype=complex)
    dim = prepare.shape[0]
    psi0 = prepare[:, 0]
    mask = _solution_mask(predicate, dim)
    budget = cfg.budget_for(dim)
    rng = np.random.default_rng(cfg.rng_seed)
    m = 1.0
    cap = math.sqrt(dim)
    used = 0
    iterations = 0
    measurements = 0
    while used < budget:
        j = int(rng.integers(0, max(int(math.ceil(m)), 1)))
        j = min(j, budget - used)
        state = psi0.copy()
        for _ in range(j):
            state[mask] *= -1.0
            state = 2.0 * np.vdot(psi0, state) * psi0 - state
            state = state.copy()
        probs = np.abs(state) ** 2
        probs /= probs.sum()
        z = int(rng.choice(dim, p=probs))
        iterations += j
        measurements += 1
        used += j + 1
        if mask[z]:
            return QSearchResult(z, iterations, measurements)
        m = min(m * cfg.schedule_growth, cap)
    return QSearchResult(None, iterations, measurements)


@dataclass(frozen=True)
class AndOracleFragment:
    """Distributed query |i>|b> -> |i>|b xor (x_i and y_i)|.

    Communication cost is one round trip of the index plus target:
    2 * (index qubits + 1).
    """

    block_indices: tuple
    x_block: tuple
    y_block: tuple

    def __post_init__(self):
        object.__setattr__(self, "block_indices", tuple(self.block_indices))
        object.__setattr__(self, "x_block", tuple(self.x_block))
        object.__setattr__(self, "y_block", tuple(self.y_block))
        if not (len(self.block_indices) == len(self.x_block)
                == len(self.y_block) >= 1):
            raise ValueError("block inputs must share a positive length")

    @property
    def index_qubits(self) -> int:
        b = len(self.block_indices)
        return max(int(math.ceil(math.log2(b))), 0)

    @property
    def cost(self) -> int:
        return 2 * (self.index_qubits + 1)

    def flips(self, i: int) -> bool:
        return i < len(self.x_block) and bool(self.x_block[i] & self.y_block[i])

    @property
    def solutions(self) -> tuple:
        return tuple(i for i in range(1 << self.index_qubits) if self.flips(i))

    @property
    def unitary(self) -> np.ndarray:
        k = self.index_qubits
        dim = 1 << (k + 1)
        u = np.zeros((dim, dim))
        for i in range(1 << k):
            flip = 1 if self.flips(i) else 0
            for t in range(2):
                u[(i << 1) | (t ^ flip), (i << 1) | t] = 1.0
        return u


def distributed_and_oracle(block_indices, x_block, y_block) -> AndOracleFragment:
    return AndOracleFragment(block_indices, _bit_list(x_block),
                             _bit_list(y_block))


@dataclass(frozen=True)
class IntersectionResult:
    index: Optional[int]
    cost: int
    iterations: int
    measurements: int

    @property
    def found(self) -> bool:
        return self.index is not None


def _uniform_prepare(k: int) -> np.ndarray:
    u = np.array([[1.0]])
    for _ in range(k):
        u = np.kron(u, H1)
    return u


def bcw_intersection(x, y, cfg: QSearchConfig) -> IntersectionResult:
    """Search for an index with x_i = y_i = 1 via distributed queries.

    Inputs are padded with zeros to a power of two.  Every amplification
    iteration costs one distributed query, 2(log2 n + 1) qubits, and each
    measured candidate is verified classically for 2 log2 n + 2 qubits,
    so the answer is never a false positive.
    """
    x, y = _bit_list(x), _bit_list(y)
    if len(x) != len(y) or not x:
        raise ValueError("inputs must be equal nonzero length")
    n = len(x)
    k = max(int(math.ceil(math.log2(n))), 0)
    pad = (1 << k) - n
    oracle = distributed_and_oracle(range(1 << k), x + [0] * pad,
                                    y + [0] * pad)
    verify_cost = 2 * k + 2
    if k == 0:
        # single candidate: verify it classically and answer
        idx = 0 if x[0] & y[0] else None
        return IntersectionResult(idx, verify_cost, 0, 1)
    res = qsearch(_uniform_prepare(k), oracle.solutions, cfg)
    cost = res.iterations * oracle.cost + res.measurements * verify_cost
    return IntersectionResult(res.outcome, cost, res.iterations,
                              res.measurements)


def _default_block_size(n) -> int:
    return max(1, int(math.ceil(math.log2(n) ** 2)))


@dataclass(frozen=True)
class RecursionConfig:
    block_size_rule: Callable = _default_block_size
    base_threshold: int = 64
    kappa: float = 2.0
    amplification_rounds_rule: Optional[Callable] = None

    def __post_init__(self):
        if self.base_threshold < 2:
            raise ValueError("base_threshold must be >= 2")

    def rounds(self, n: int) -> int:
        if self.amplification_rounds_rule is not None:
            return int(self.amplification_rounds_rule(n))
        return int(math.ceil(self.kappa * math.sqrt(n) / math.log2(n)))


def recursive_intersection(x, y, rcfg: RecursionConfig,
                           cfg: QSearchConfig) -> IntersectionResult:
    """Blocked intersection search with end-to-end amplification.

    Indices are split into blocks; a superposed block-choice register is
    joined with an in-block search stage, the combined preparation is
    amplified globally, and every measured candidate is verified
    classically before it is reported.  Small inputs (or block sizes that
    do not split the input) delegate to bcw_intersection unchanged.
    """
    x, y = _bit_list(x), _bit_list(y)
    if len(x) != len(y) or not x:
        raise ValueError("inputs must be equal nonzero length")
    n = len(x)
    b = rcfg.block_size_rule(n)
    if n <= rcfg.base_threshold or b >= n:
        return bcw_intersection(x, y, cfg)
    nblocks = int(math.ceil(n / b))
    jbits = max(int(math.ceil(math.log2(nblocks))), 0)
    lbits = max(int(math.ceil(math.log2(b))), 0)
    dim = 1 << (jbits + lbits)
    ldim = 1 << lbits
    mask = np.zeros(dim, dtype=bool)
    for z in range(dim):
        blk, off = z >> lbits, z & (ldim - 1)
        pos = blk * b + off
        mask[z] = off < b and pos < n and bool(x[pos] & y[pos])
    uniform = np.full(dim, 1.0 / math.sqrt(dim))
    rng = np.random.default_rng(cfg.rng_seed)
    query_cost = 2 * (jbits + lbits + 1)
    verify_cost = 2 * int(math.ceil(math.log2(n))) + 2
    cost = 0
    iterations = 0
    measurements = 0
    for _ in range(rcfg.rounds(n)):
        j_leaf = int(rng.integers(0, int(math.ceil(math.sqrt(ldim)))))
        state = uniform.copy()
        for _ in range(j_leaf):
            state = state.copy()
            state[mask] *= -1.0
            # reflect about the uniform leaf state within each block
            rows = state.reshape(1 << jbits, ldim)
            state = (2.0 * rows.mean(axis=1, keepdims=True) - rows).reshape(dim)
        psi1 = state.copy()
        j_outer = int(rng.integers(0, int(math.ceil(math.sqrt(2 * nblocks)))))
        for _ in range(j_outer):
            state = state.copy()
            state[mask] *= -1.0
            state = 2.0 * np.vdot(psi1, state) * psi1 - state
        probs = np.abs(state) ** 2
        probs /= probs.sum()
        z = int(rng.choice(dim, p=probs))
        # each outer iteration replays the in-block stage twice (do/undo)
        leaf_stage = j_leaf * query_cost
        cost += leaf_stage + j_outer * (query_cost + 2 * leaf_stage)
        cost += verify_cost
        iterations += j_leaf + j_outer
        measurements += 1
        blk, off = z >> lbits, z & (ldim - 1)
        pos = blk * b + off
        if off < b and pos < n and x[pos] & y[pos]:
            return IntersectionResult(pos, cost, iterations, measurements)
    return IntersectionResult(None, cost, iterations, measurements)


def bcw_cost_model(n: float, k: float = 1.0, kp: float = 1.0) -> float:
    """Closed-form cost of the flat search: O(sqrt n) distributed queries
    of 2(log2 n + 1) qubits plus kp-weighted verification exchanges."""
    if n <= 1:
        return 2.0
    lg = math.log2(n)
    return k * (2.0 + 2.0 * kp) * math.sqrt(n) * (lg + 1.0)


def cost_model(n, rcfg: Optional[RecursionConfig] = None,
               k: float = 1.0, kp: float = 1.0) -> float:
    """Closed-form cost bound for the blocked recursion.

    cost(1) = 2; at or below the threshold the flat model applies; above
    it, cost(n) = k * (sqrt(n)/log2 n) * (cost(block) + kp * log2 n).
    The per-sqrt(n) rate is clamped from below by its threshold value so
    the model is monotone in n (one may always fall back to the flat
    method, so the bound stays valid).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rcfg = rcfg or RecursionConfig()

    def ratio_floor() -> float:
        return bcw_cost_model(rcfg.base_threshold, k, kp) \
            / math.sqrt(rcfg.base_threshold)

    def model(nn: float) -> float:
        if nn <= 1:
            return 2.0
        if nn <= rcfg.base_threshold:
            return max(2.0, bcw_cost_model(nn, k, kp))
        b = rcfg.block_size_rule(nn)
        inner = bcw_cost_model(b, k, kp) if b >= nn else model(b)
        lg = math.log2(nn)
        rate = k * (inner + kp * lg) / lg
        return math.sqrt(nn) * max(rate, ratio_floor())

    return float(model(n))


def log_star(n: float) -> int:
    """Iterated log2 count until the value drops to 1 or below."""
    if n <= 0:
        raise ValueError("n must be positive")
    count = 0
    v = float(n)
    while v > 1.0:
        v = math.log2(v)
        count += 1
    return count


@dataclass(frozen=True)
class CostEnvelopeFit:
    c: float
    kappa: float
    ratios: tuple
    log_stars: tuple
    monotone: bool


def fit_cost_envelope(ns: Sequence[int],
                      rcfg: Optional[RecursionConfig] = None,
                      k: float = 1.0, kp: float = 1.0,
                      c: float = 2.0) -> CostEnvelopeFit:
    """Fit kappa so cost(n)/sqrt(n) <= kappa * c**log_star(n) on the probes."""
    ratios = tuple(cost_model(n, rcfg, k, kp) / math.sqrt(n) for n in ns)
    stars = tuple(log_star(n) for n in ns)
    kappa = max(r / c ** s for r, s in zip(ratios, stars))
    monotone = all(a <= b + 1e-12 for a, b in zip(ratios, ratios[1:]))
    return CostEnvelopeFit(c=c, kappa=kappa, ratios=ratios,
                           log_stars=stars, monotone=monotone)


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    protocol: Protocol
    target: CommMatrix
    exact_rational: bool


def protocol_corpus(n: int) -> list:
    """Named protocols used by the cross-cutting audits."""
    from .ranklab import build_comm_matrix, canonical_witness
    entries = []
    for fn in ("EQ", "DISJ", "INT"):
        target = build_comm_matrix(fn, n)
        entries.append(CorpusEntry(f"trivial-{fn}", trivial_exact_protocol(target),
                                   target, exact_rational=True))
    for fn in ("EQ", "NEQ", "INT"):
        target = build_comm_matrix(fn, n)
        bundle = ndet_svd_protocol(canonical_witness(fn, n))
        entries.append(CorpusEntry(f"svd-{fn}", bundle.protocol, target,
                                   exact_rational=False))
    return entries
