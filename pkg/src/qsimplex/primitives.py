"""Quantum primitive simulations: phase estimation, amplitude estimation,
Grover QSearch, and minimum finding, with exact outcome distributions.

Two execution modes run through everything:

* analytic -- outcome distributions are evaluated in closed form from the
  simulated state (the standard phase-estimation kernel), so tests are
  deterministic;
* sampling -- outcomes are drawn from those same distributions with a
  seeded generator, which is statistically identical to measuring the
  full statevector circuit (``pe_circuit_distribution`` below builds the
  honest circuit distribution for cross-checks).

Query accounting conventions (one call of phase estimation on ``t`` bits,
``M = 2^t``): ``M`` controlled powers of the walk/Grover operator are
charged as ``M`` controlled-U calls and ``2M`` U-calls (operator and
inverse inside each iterate), ``t^2`` basic gates for the inverse QFT,
plus the state-preparation cost per iterate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .statevector import PreparedUnitary


class AllInfinite(ValueError):
    """Minimum finding over a domain where every value is +inf."""


@dataclass
class QueryStats:
    """Monotone counters accumulated by every subroutine run.

    Formula-charged counters (oracle queries, gates) are floats because the
    per-invocation charges come from the cost-model expressions; discrete
    counters (iterations, repetitions) stay integral-valued.
    """

    u_calls: float = 0.0
    controlled_u_calls: float = 0.0
    qlsa_invocations: float = 0.0
    p_ab_queries: float = 0.0
    p_b_queries: float = 0.0
    grover_iterations: float = 0.0
    ae_repetitions: float = 0.0
    basic_gates: float = 0.0

    def add(self, other: "QueryStats") -> None:
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))

    def scaled(self, factor: float) -> "QueryStats":
        out = QueryStats()
        for f in fields(self):
            setattr(out, f.name, getattr(self, f.name) * factor)
        return out

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


# ---------------------------------------------------------------------------
# phase estimation


def extra_qubits(eps_fail: float) -> int:
    """Extra precision qubits needed for failure probability eps_fail."""
    if not 0 < eps_fail < 1:
        raise ValueError("eps_fail must lie in (0, 1)")
    return math.ceil(math.log2(2.0 + 1.0 / (2.0 * eps_fail)))


def pe_outcome_distribution(phi: float, t: int) -> np.ndarray:
    """Exact distribution of the t-bit phase-estimation outcome for
    eigenphase phi: ``P(y) = sin^2(pi M d) / (M^2 sin^2(pi d))`` with
    ``d = phi - y/M`` (and a point mass when phi lies on the grid)."""
    M = 2 ** t
    y = np.arange(M)
    delta = phi - y / M
    delta -= np.round(delta)  # wrap to [-1/2, 1/2]; the kernel is 1-periodic
    small = np.abs(delta) < 1e-15
    with np.errstate(divide="ignore", invalid="ignore"):
        p = (np.sin(np.pi * M * delta) / (M * np.sin(np.pi * delta))) ** 2
    p[small] = 1.0
    p[~np.isfinite(p)] = 0.0
    return p / p.sum()


def pe_circuit_distribution(unitary, psi: np.ndarray, t: int) -> np.ndarray:
    """Full statevector simulation of the textbook PE circuit.

    Applies the controlled powers ``U^x`` for x = 0 .. 2^t - 1 followed by
    the inverse QFT on the estimation register and returns the marginal
    outcome distribution.  Used as the non-eigenstate fallback of
    ``phase_estimation`` and for analytic-vs-circuit agreement checks.
    """
    mat = unitary.matrix if isinstance(unitary, PreparedUnitary) else np.asarray(unitary)
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    M = 2 ** t
    cols = np.empty((M, psi.size), dtype=complex)
    cur = psi.copy()
    for x in range(M):
        cols[x] = cur
        cur = mat @ cur
    amp = np.fft.fft(cols, axis=0) / M
    p = (np.abs(amp) ** 2).sum(axis=1)
    return p / p.sum()


def _charge_pe(stats: QueryStats | None, t: int, prep_gate_cost: float = 0.0) -> None:
    if stats is None:
        return
    M = 2 ** t
    stats.controlled_u_calls += M
    stats.u_calls += 2 * M
    stats.ae_repetitions += M
    stats.basic_gates += t * t + M * prep_gate_cost


@dataclass(frozen=True)
class PhaseEstimate:
    """One phase-estimation readout (or its exact distribution)."""

    bits: int
    y: int | None
    distribution: np.ndarray | None

    @property
    def value(self) -> float:
        if self.y is None:
            raise ValueError("no sampled outcome in analytic mode")
        return self.y / 2 ** self.bits


def phase_estimation(unitary, eigenstate: np.ndarray, q_precision: int,
                     eps_fail: float, mode: str = "analytic",
                     rng: np.random.Generator | None = None,
                     stats: QueryStats | None = None) -> PhaseEstimate:
    """Phase estimation with ``q_precision + ceil(log2(2 + 1/(2 eps_fail)))``
    total qubits, so the first ``q_precision`` bits are accurate with
    probability at least ``1 - eps_fail``.

    On an eigenstate the exact outcome kernel is used; any other input
    falls back to the full statevector circuit simulation.
    """
    mat = unitary.matrix if isinstance(unitary, PreparedUnitary) else np.asarray(unitary)
    psi = np.asarray(eigenstate, dtype=complex).reshape(-1)
    psi = psi / np.linalg.norm(psi)
    t = q_precision + extra_qubits(eps_fail)

    w = mat @ psi
    lam = np.vdot(psi, w)
    if np.linalg.norm(w - lam * psi) <= 1e-10:
        phi = float(np.angle(lam) / (2 * np.pi)) % 1.0
        dist = pe_outcome_distribution(phi, t)
    else:
        dist = pe_circuit_distribution(mat, psi, t)
    _charge_pe(stats, t)
    if mode == "analytic":
        return PhaseEstimate(bits=t, y=None, distribution=dist)
    if mode == "sampling":
        y = int(rng.choice(dist.size, p=dist))
        return PhaseEstimate(bits=t, y=y, distribution=dist)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# amplitude estimation


def fold_phase(y: int, M: int) -> float:
    """Map the readout to [0, 1/2]: phases theta and 1 - theta are the two
    eigenphase branches of the Grover operator and carry the same amplitude."""
    return min(y, M - y) / M


def theta_of_amplitude(a: float) -> float:
    """Phase theta in [0, 1/2] with ``sin(pi theta) = sqrt(a)``."""
    a = min(max(a, 0.0), 1.0)
    return math.asin(math.sqrt(a)) / math.pi


def ae_distribution(a: float, bits: int) -> np.ndarray:
    """Exact amplitude-estimation outcome distribution for target
    probability ``a``: the equal mixture of the phase-estimation kernels at
    ``theta`` and ``1 - theta``."""
    theta = theta_of_amplitude(a)
    return 0.5 * (pe_outcome_distribution(theta, bits)
                  + pe_outcome_distribution(-theta, bits))


def grover_operator(prep: PreparedUnitary, target: int) -> np.ndarray:
    """Grover iterate ``Q = (2|psi><psi| - I) S_target`` whose eigenphases
    are ``+-theta`` with ``sin(pi theta) = |<target|psi>|`` (circuit-mode
    cross-check for the analytic AE kernel)."""
    psi = prep.state
    dim = psi.size
    s_t = np.eye(dim, dtype=complex)
    s_t[target, target] = -1.0
    return (2.0 * np.outer(psi, psi.conj()) - np.eye(dim)) @ s_t


@dataclass(frozen=True)
class AEOutcome:
    bits: int
    theta_true: float
    y: int
    distribution: np.ndarray | None

    @property
    def theta_est(self) -> float:
        return fold_phase(self.y, 2 ** self.bits)

    @property
    def amp_est(self) -> float:
        return math.sin(math.pi * self.theta_est)

    @property
    def phase_error(self) -> float:
        return abs(self.theta_est - self.theta_true)

    def within(self, tol: float) -> bool:
        return self.phase_error <= tol + 1e-15


def amplitude_estimation(prep, target: int, bits: int, mode: str = "analytic",
                         rng: np.random.Generator | None = None,
                         stats: QueryStats | None = None,
                         prep_gate_cost: float = 0.0,
                         keep_distribution: bool = False) -> AEOutcome:
    """Estimate the magnitude of the target basis-state amplitude of
    ``prep`` (a PreparedUnitary or a bare state vector) with ``bits``
    qubits of phase accuracy.

    Analytic mode reads out the most likely grid point of the exact
    outcome distribution; sampling mode draws from it.
    """
    if isinstance(prep, PreparedUnitary):
        state = prep.state
        prep_gate_cost = prep_gate_cost or prep.gate_cost
    else:
        state = np.asarray(prep)
    a = float(abs(state[target]) ** 2)
    theta = theta_of_amplitude(a)
    dist = ae_distribution(a, bits)
    _charge_pe(stats, bits, prep_gate_cost)
    if mode == "analytic":
        y = int(np.argmax(dist))
    elif mode == "sampling":
        y = int(rng.choice(dist.size, p=dist))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return AEOutcome(bits=bits, theta_true=theta, y=y,
                     distribution=dist if keep_distribution else None)


# ---------------------------------------------------------------------------
# Grover search with unknown number of marked items (QSearch)

_QSEARCH_GROWTH = 6.0 / 5.0
_QSEARCH_BUDGET = 9.0  # total Grover iterations <= ceil(9 sqrt(N)) + 4


def qsearch_budget(n: int) -> int:
    return math.ceil(_QSEARCH_BUDGET * math.sqrt(max(n, 1))) + 4


def qsearch(domain, marked, rng: np.random.Generator,
            stats: QueryStats | None = None, confirm=None,
            max_iterations: int | None = None):
    """QSearch over ``domain`` with an unknown number of marked items.

    ``marked`` is the effective marked set driving the Grover dynamics (a
    realization of the bounded-error oracle's decisions for this run);
    ``confirm`` optionally re-checks a measured candidate and is what the
    returned index must pass.  Returns a marked index, or None once the
    iteration budget ``O(sqrt(N))`` is exhausted (no marked item found).

    Conditioned on success the returned index is uniform over the marked
    set, which is the standard QSearch property with randomized iterate
    counts.
    """
    domain = list(domain)
    n = len(domain)
    if n == 0:
        return None
    marked = [i for i in domain if i in set(marked)]
    k = len(marked)
    unmarked = [i for i in domain if i not in set(marked)]
    theta = math.asin(math.sqrt(k / n)) if k else 0.0
    budget = max_iterations if max_iterations is not None else qsearch_budget(n)
    mmax = math.sqrt(n)
    m_cur = 1.0
    used = 0
    while used <= budget:
        j = int(rng.integers(0, max(1, int(m_cur))))
        used += j + 1
        if stats is not None:
            stats.grover_iterations += j + 1
        p_hit = math.sin((2 * j + 1) * theta) ** 2 if k else 0.0
        if rng.random() < p_hit:
            idx = int(marked[rng.integers(k)])
        else:
            pool = unmarked if unmarked else marked
            idx = int(pool[rng.integers(len(pool))])
        ok = confirm(idx) if confirm is not None else (idx in set(marked))
        if ok:
            return idx
        m_cur = min(_QSEARCH_GROWTH * m_cur, mmax)
    return None


def qsearch_analytic(domain, marked, stats: QueryStats | None = None):
    """Deterministic stand-in for analytic mode: lowest marked index, with
    the canonical ``ceil(pi/4 sqrt(N/k))`` iteration charge."""
    domain = list(domain)
    marked = sorted(set(marked) & set(domain))
    n = len(domain)
    if stats is not None:
        k = max(len(marked), 1)
        stats.grover_iterations += math.ceil(math.pi / 4 * math.sqrt(n / k)) if n else 0
    return marked[0] if marked else None


def grover_count_exists(domain, marked, rng: np.random.Generator | None,
                        stats: QueryStats | None = None,
                        mode: str = "analytic", schedules: int = 1) -> bool:
    """Counting-flavored existence check with a fixed ``3 ceil(pi/4 sqrt(N))``
    iteration budget (success probability at least 5/6 per schedule);
    ``schedules`` independent repetitions push a miss probability of p down
    to p^schedules when a missed marked item is costly to the caller."""
    domain = list(domain)
    n = len(domain)
    if n == 0:
        return False
    budget = 3 * math.ceil(math.pi / 4.0 * math.sqrt(n))
    if mode == "analytic":
        if stats is not None:
            stats.grover_iterations += budget * schedules
        return bool(set(marked) & set(domain))
    for _ in range(schedules):
        if qsearch(domain, marked, rng, stats, max_iterations=budget) is not None:
            return True
    return False


# ---------------------------------------------------------------------------
# minimum finding (Durr-Hoyer)

_DH_BUDGET = 22.5


def dh_budget(n: int) -> int:
    return math.ceil(_DH_BUDGET * math.sqrt(max(n, 1))
                     + 1.4 * math.log2(max(n, 2)) ** 2)


def min_finding(values, rng: np.random.Generator | None = None,
                stats: QueryStats | None = None, reps: int = 2,
                mode: str = "sampling") -> int:
    """Index minimizing ``values`` (entries may be +inf) via the
    threshold-descent search: repeatedly Grover-search for an index with a
    value below the current pivot inside an ``O(sqrt(N))`` iteration
    budget.  One schedule succeeds with probability >= 1/2; ``reps``
    independent schedules keep the best candidate (>= 3/4 for reps = 2).
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    if n == 0 or not np.any(np.isfinite(values)):
        raise AllInfinite("no finite value in the search domain")
    if mode == "analytic":
        if stats is not None:
            stats.grover_iterations += reps * dh_budget(n)
        return int(np.argmin(values))

    domain = list(range(n))
    best: int | None = None
    for _ in range(reps):
        pivot = int(rng.integers(n))
        budget = dh_budget(n)
        start = stats.grover_iterations if stats is not None else 0
        local = QueryStats() if stats is None else stats
        while local.grover_iterations - start < budget:
            below = frozenset(i for i in domain if values[i] < values[pivot])
            remaining = int(budget - (local.grover_iterations - start))
            found = qsearch(domain, below, rng, local, max_iterations=remaining)
            if found is None:
                break
            pivot = found
        if best is None or values[pivot] < values[best]:
            best = pivot
    return int(best)
