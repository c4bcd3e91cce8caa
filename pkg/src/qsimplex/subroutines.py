"""The quantum simplex subroutines, composed from the simulated primitives.

Pipeline per iteration (normalize -> IsOptimal -> FindColumn ->
IsUnbounded -> FindRow -> pivot), with the sign-estimation gadgets doing
the heavy lifting:

* a Hadamard interference gadget turns the signed target amplitude
  ``alpha`` into the magnitude ``(1 + alpha)/2`` on ``|0>|k>`` (or
  ``(1 - alpha)/2`` on ``|1>|k>`` for the positive-sign variants), and
* amplitude estimation reads that magnitude out at a precision/threshold
  pairing tuned so one variant has no false negatives and the other no
  false positives near the decision boundary.

Variant bindings for the positive-sign tests are fixed by what the
consumers must be able to conclude: the unboundedness check needs its
0-return to certify "component below the tolerance", which requires the
fine (1/9-scaled) estimation window, while the ratio-test gate needs its
1-return to certify "denominator above delta/2", which the coarse window
delivers.

Cost accounting: oracle evaluations inside Grover/minimum-finding loops
are charged per activation (iterations plus confirmation checks) using
the deterministic per-call cost; the simulation-side draws that realize
bounded-error oracle decisions are bookkeeping, not algorithm cost.

Each subroutine run owns its generator and counters; inputs are immutable,
so independent runs are safe to parallelize from the caller's side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .costmodel import column_split, split_threshold  # re-exported  # noqa: F401
from .lp import (BasisState, LpInstance, ZeroColumn, normalize,
                 scaled_basis_matrix)
from .primitives import (AEOutcome, QueryStats, _charge_pe, ae_distribution,
                         amplitude_estimation, grover_count_exists,
                         min_finding, qsearch, qsearch_analytic,
                         theta_of_amplitude)
from .qlsa import IdealQlsa
from .statevector import PreparedUnitary

SQRT3PI = math.sqrt(3.0) * math.pi


@dataclass(frozen=True)
class PrecisionParams:
    """Run tolerances: eps (pricing, relative to the extended column norm),
    delta (feasibility), t (ratio-test precision multiplier), reps (odd
    majority-vote count boosting each bounded-error subroutine)."""

    eps: float = 0.1
    delta: float = 0.1
    t: float = 100.0
    reps: int = 15

    def __post_init__(self):
        if not 0 < self.eps <= 0.5:
            raise ValueError("eps must lie in (0, 1/2]")
        if not 0 < self.delta <= 0.5:
            raise ValueError("delta must lie in (0, 1/2]")
        if self.t < 1:
            raise ValueError("t must be >= 1")
        if self.reps < 1 or self.reps % 2 == 0:
            raise ValueError("reps must be odd and >= 1")


# ---------------------------------------------------------------------------
# sign estimation (the four gadget variants)

SIGN_EST_KINDS = ("nfn", "nfp", "nfn_plus", "nfp_plus")


@dataclass(frozen=True)
class SignEstSpec:
    kind: str
    bits: int
    threshold: float
    tol: float            # phase accuracy achieved w.p. >= 3/4
    flipped: bool         # estimate |1>|k> (amplitude (1 - alpha)/2)
    rule: str             # comparison of the folded readout with threshold

    def decide(self, fold: float) -> int:
        if self.rule == "geq":
            return int(fold >= self.threshold)
        if self.rule == "gt":
            return int(fold > self.threshold)
        return int(fold <= self.threshold)  # "leq"

    @property
    def alpha_boundary(self) -> float:
        """Decision threshold mapped back to amplitude units."""
        s = 2.0 * math.sin(math.pi * self.threshold)
        return s - 1.0 if not self.flipped else 1.0 - s


def sign_est_spec(eps: float, kind: str, threshold_shift: float = 0.0) -> SignEstSpec:
    """Bits/threshold table for the four routines.

    coarse: ``ceil(log2(sqrt(3) pi / eps)) + 2`` bits, threshold
    ``1/6 - 2 eps/(sqrt(3) pi)``; fine: ``ceil(log2(9 sqrt(3) pi/eps)) + 2``
    bits, threshold ``1/6 - 2 eps/(3 sqrt(3) pi)``.  ``threshold_shift`` is
    a test hook for mutation checks and must stay 0 in real runs.
    """
    if kind not in SIGN_EST_KINDS:
        raise ValueError(f"kind must be one of {SIGN_EST_KINDS}")
    if not 0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 1/2]")
    coarse = kind in ("nfn", "nfp_plus")
    if coarse:
        bits = math.ceil(math.log2(SQRT3PI / eps)) + 2
        threshold = 1.0 / 6.0 - 2.0 * eps / SQRT3PI
        tol = eps / SQRT3PI
    else:
        bits = math.ceil(math.log2(9.0 * SQRT3PI / eps)) + 2
        threshold = 1.0 / 6.0 - 2.0 * eps / (3.0 * SQRT3PI)
        tol = eps / (9.0 * SQRT3PI)
    rule = {"nfn": "geq", "nfp": "gt", "nfn_plus": "leq", "nfp_plus": "leq"}[kind]
    return SignEstSpec(kind=kind, bits=bits, threshold=threshold + threshold_shift,
                       tol=tol, flipped=kind.endswith("_plus"), rule=rule)


def _gadget_amplitude(alpha: float, flipped: bool) -> float:
    amp = (1.0 - alpha) / 2.0 if flipped else (1.0 + alpha) / 2.0
    return min(max(amp, 0.0), 1.0)


def _target_alpha(prep, k: int | None) -> float:
    """Real amplitude of basis state k in U|0..0>, up to global phase."""
    if isinstance(prep, (int, float, np.floating)):
        return float(prep)
    if isinstance(prep, PreparedUnitary):
        if not prep.real_amplitude:
            raise ValueError("sign estimation needs a real-amplitude preparation")
        state = prep.state
    else:
        state = np.asarray(prep, dtype=complex).reshape(-1)
    j = int(np.argmax(np.abs(state)))
    phase = state[j] / abs(state[j])
    deph = state * np.conj(phase)
    if np.abs(deph.imag).max() > 1e-9:
        raise ValueError("state amplitudes are not real up to a global phase")
    return float(deph.real[k])


@dataclass(frozen=True)
class SignEstResult:
    value: int
    in_tol: bool            # folded readout within the phase tolerance
    prob_one: float
    theta_true: float
    outcome: AEOutcome | None = None


def _gadget_tables(alpha: float, spec: SignEstSpec):
    """Distribution plus decision/tolerance masks over the AE readout grid."""
    a = _gadget_amplitude(alpha, spec.flipped) ** 2
    theta = theta_of_amplitude(a)
    m_size = 2 ** spec.bits
    dist = ae_distribution(a, spec.bits)
    y = np.arange(m_size)
    folds = np.minimum(y, m_size - y) / m_size
    if spec.rule == "geq":
        ones = folds >= spec.threshold
    elif spec.rule == "gt":
        ones = folds > spec.threshold
    else:
        ones = folds <= spec.threshold
    in_tol = np.abs(folds - theta) <= spec.tol + 1e-15
    return theta, dist, ones, in_tol


def sign_est_prob_one(alpha: float, eps: float, kind: str,
                      threshold_shift: float = 0.0) -> float:
    """Exact Pr[routine returns 1] from the analytic AE distribution."""
    spec = sign_est_spec(eps, kind, threshold_shift)
    _, dist, ones, _ = _gadget_tables(alpha, spec)
    return float(dist[ones].sum())


def sign_est(prep, k: int | None, eps: float, kind: str,
             mode: str = "analytic", rng: np.random.Generator | None = None,
             stats: QueryStats | None = None, per_ucall: QueryStats | None = None,
             threshold_shift: float = 0.0) -> SignEstResult:
    """One run of a sign-estimation routine on the target amplitude.

    Analytic mode returns the maximum-likelihood decision together with
    the exact probability of returning 1; sampling mode draws the AE
    readout.  ``per_ucall`` optionally charges the preparation cost of U
    once per estimation-loop application (2 M calls for M = 2^bits).
    """
    alpha = _target_alpha(prep, k)
    spec = sign_est_spec(eps, kind, threshold_shift)
    theta, dist, ones, in_tol = _gadget_tables(alpha, spec)
    prob_one = float(dist[ones].sum())
    _charge_pe(stats, spec.bits)
    if stats is not None and per_ucall is not None:
        stats.add(per_ucall.scaled(2.0 * 2 ** spec.bits + 1.0))
    if mode == "analytic":
        y = int(np.argmax(dist))
        outcome = AEOutcome(bits=spec.bits, theta_true=theta, y=y, distribution=None)
        return SignEstResult(value=int(prob_one >= 0.5), in_tol=True,
                             prob_one=prob_one, theta_true=theta, outcome=outcome)
    if mode != "sampling":
        raise ValueError(f"unknown mode {mode!r}")
    y = int(rng.choice(dist.size, p=dist))
    outcome = AEOutcome(bits=spec.bits, theta_true=theta, y=y, distribution=None)
    return SignEstResult(value=int(ones[y]), in_tol=bool(in_tol[y]),
                         prob_one=prob_one, theta_true=theta, outcome=outcome)


def sign_est_nfn(prep, k, eps, **kw) -> SignEstResult:
    """No-false-negative test: 1 whenever alpha_k >= -eps."""
    return sign_est(prep, k, eps, "nfn", **kw)


def sign_est_nfp(prep, k, eps, **kw) -> SignEstResult:
    """No-false-positive test: 0 whenever alpha_k <= -eps."""
    return sign_est(prep, k, eps, "nfp", **kw)


def sign_est_plus(prep, k, eps, variant: str = "nfn", **kw) -> SignEstResult:
    """Positive-sign tests on the mirrored gadget (amplitude of |1>|k>).

    variant "nfn": returning 0 certifies alpha_k < eps (used by the
    unboundedness check); variant "nfp": returning 1 certifies
    alpha_k > eps (used by the ratio-test denominator gate).
    """
    kind = {"nfn": "nfn_plus", "nfp": "nfp_plus"}[variant]
    return sign_est(prep, k, eps, kind, **kw)


@dataclass(frozen=True)
class BoostedResult:
    value: int
    ok: bool                # majority of the votes were within tolerance
    ones: int
    in_tol_count: int
    prob_one: float


def boosted_sign_est(alpha: float, eps: float, kind: str, reps: int,
                     mode: str = "analytic",
                     rng: np.random.Generator | None = None,
                     stats: QueryStats | None = None,
                     per_ucall: QueryStats | None = None,
                     threshold_shift: float = 0.0) -> BoostedResult:
    """reps-fold majority vote over independent sign-estimation runs.

    When at least ``(reps + 1)/2`` runs landed within the phase tolerance
    and the majority decision is v, some in-tolerance run also voted v, so
    the single-run certificate for v transfers to the boosted output.
    """
    spec = sign_est_spec(eps, kind, threshold_shift)
    theta, dist, ones_mask, in_tol_mask = _gadget_tables(alpha, spec)
    p1 = float(dist[ones_mask].sum())
    if stats is not None:
        per = QueryStats()
        _charge_pe(per, spec.bits)
        if per_ucall is not None:
            per.add(per_ucall.scaled(2.0 * 2 ** spec.bits + 1.0))
        stats.add(per.scaled(reps))
    if mode == "analytic":
        value = int(p1 >= 0.5)
        return BoostedResult(value=value, ok=True, ones=value * reps,
                             in_tol_count=reps, prob_one=p1)
    ys = rng.choice(dist.size, size=reps, p=dist)
    ones = int(ones_mask[ys].sum())
    in_tol = int(in_tol_mask[ys].sum())
    majority = (reps + 1) // 2
    return BoostedResult(value=int(ones >= majority), ok=in_tol >= majority,
                         ones=ones, in_tol_count=in_tol, prob_one=p1)


# ---------------------------------------------------------------------------
# scaled per-iteration data


@dataclass
class ScaledBasis:
    """Scaled data bundle one iteration works with: ``|A_B| <= 1`` with
    spectrum in [1/kappa, 1], ``|c_B| = 1`` (the column scales in
    ``A_B^-1 A_k`` cancel, so directions are scale-free)."""

    instance: LpInstance
    state: BasisState
    AB: np.ndarray
    c: np.ndarray
    error_mode: str
    rng: np.random.Generator | None
    qlsa: IdealQlsa
    qlsa_ext: IdealQlsa

    @classmethod
    def build(cls, instance: LpInstance, basis, eps_prime: float = 1e-4,
              error_mode: str = "zero", rng: np.random.Generator | None = None,
              norm_seed: int = 0) -> "ScaledBasis":
        state = basis if isinstance(basis, BasisState) else \
            normalize(instance, basis, eps_prime, seed=norm_seed)
        AB = scaled_basis_matrix(instance, state)
        m = instance.m
        ext = np.zeros((m + 1, m + 1))
        ext[:m, :m] = AB
        ext[m, m] = 1.0
        qlsa = IdealQlsa(AB, state.kappa, state.sparsity, error_mode, rng=rng,
                         check_spectrum=False)
        qlsa_ext = IdealQlsa(ext, state.kappa, state.sparsity, error_mode,
                             rng=rng, check_spectrum=False)
        return cls(instance=instance, state=state, AB=AB,
                   c=state.cost_scale * instance.c, error_mode=error_mode,
                   rng=rng, qlsa=qlsa, qlsa_ext=qlsa_ext)

    def scaled_column(self, k: int) -> np.ndarray:
        col = self.state.matrix_scale * self.instance.column(k)
        if not np.any(col):
            raise ZeroColumn(f"column {k} is zero")
        return col

    @property
    def cost_vector_gadget(self) -> np.ndarray:
        """|(-c_B, 1)> -- the functional whose overlap encodes the reduced cost."""
        w = np.concatenate([-self.c[list(self.state.basis)], [1.0]])
        return w / np.linalg.norm(w)


# ---------------------------------------------------------------------------
# reduced cost oracle and pricing (RedCost / CanEnter / FindColumn / IsOptimal)


@dataclass(frozen=True)
class RedCostSample:
    alpha: float            # target amplitude after error injection
    alpha_exact: float      # without injection (simulation-side truth)
    success: bool


def red_cost_sample(scaled: ScaledBasis, k: int, eps: float,
                    stats: QueryStats | None = None,
                    decision_alpha: float = 0.0,
                    ucalls: float = 1.0) -> RedCostSample:
    """Solve the extended system ``diag(A_B, 1)(x, y) = (A_k, c_k)`` at
    precision ``eps/(10 sqrt(2))`` and read off the all-zeros amplitude
    after un-preparing ``|(-c_B, 1)>``; that amplitude equals
    ``c_bar_k / (sqrt(2) |(A_B^-1 A_k, c_k)|)`` up to the solver error."""
    rhs = np.concatenate([scaled.scaled_column(k), [scaled.c[k]]])
    w = scaled.cost_vector_gadget
    eps_ls = eps / (10.0 * math.sqrt(2.0))
    sol = scaled.qlsa_ext.solve(rhs, eps_ls, adversary=w,
                                threshold=decision_alpha, stats=stats,
                                charge=False)
    scaled.qlsa_ext.charge(eps_ls, stats, invocations=ucalls)
    return RedCostSample(alpha=float(w @ sol.state),
                         alpha_exact=float(w @ sol.exact), success=sol.success)


@dataclass(frozen=True)
class CanEnterResult:
    value: int
    ok: bool
    alpha_exact: float
    sign_bits_one: int
    reduced_cost_scaled: float  # alpha_exact * sqrt(2): c_bar / |(u, c_k)| truth


def can_enter(scaled: ScaledBasis, k: int, eps: float, reps: int = 15,
              variant: str = "nfn", mode: str = "analytic",
              rng: np.random.Generator | None = None,
              stats: QueryStats | None = None,
              threshold_shift: float = 0.0) -> CanEnterResult:
    """1 when the (rescaled) reduced cost of column k is certified
    ``< -eps |(A_B^-1 A_k, c_k)|``: the sign estimation at precision
    ``11 eps / (10 sqrt(2))`` must return 0 and the solver flag must be up.

    variant "nfn" is the pricing default; "nfp" is the optimality-check
    variant (fires on everything at most ``-eps``, may fire inside the
    indecision window, which is exactly what IsOptimal needs).
    """
    eps_se = 11.0 * eps / (10.0 * math.sqrt(2.0))
    kind = {"nfn": "nfn", "nfp": "nfp"}[variant]
    spec = sign_est_spec(eps_se, kind, threshold_shift)
    m_calls = 2.0 * 2 ** spec.bits + 1.0
    shots = 1 if mode == "analytic" else reps
    if scaled.error_mode == "random" and mode == "sampling":
        # each repetition rebuilds the circuit, so the deviation is fresh
        ones = in_tol = 0
        success = True
        alpha_exact = 0.0
        for _ in range(shots):
            sample = red_cost_sample(scaled, k, eps, stats,
                                     decision_alpha=spec.alpha_boundary,
                                     ucalls=m_calls)
            success = success and sample.success
            alpha_exact = sample.alpha_exact
            res = sign_est(sample.alpha, None, eps_se, kind, mode=mode, rng=rng,
                           stats=None, threshold_shift=threshold_shift)
            ones += res.value
            in_tol += int(res.in_tol)
        majority = (reps + 1) // 2
        boost = BoostedResult(value=int(ones >= majority), ok=in_tol >= majority,
                              ones=ones, in_tol_count=in_tol, prob_one=float("nan"))
    else:
        sample = red_cost_sample(scaled, k, eps, stats,
                                 decision_alpha=spec.alpha_boundary,
                                 ucalls=m_calls * shots)
        success = sample.success
        alpha_exact = sample.alpha_exact
        boost = boosted_sign_est(sample.alpha, eps_se, kind, reps, mode, rng,
                                 stats=None, threshold_shift=threshold_shift)
    if stats is not None:
        per = QueryStats()
        _charge_pe(per, spec.bits)
        stats.add(per.scaled(shots))
    value = int(boost.value == 0 and success)
    return CanEnterResult(value=value, ok=boost.ok, alpha_exact=alpha_exact,
                          sign_bits_one=boost.ones,
                          reduced_cost_scaled=alpha_exact * math.sqrt(2.0))


def can_enter_cost(scaled: ScaledBasis, eps: float, reps: int,
                   variant: str = "nfn") -> QueryStats:
    """Deterministic cost of one boosted CanEnter oracle application."""
    eps_se = 11.0 * eps / (10.0 * math.sqrt(2.0))
    spec = sign_est_spec(eps_se, {"nfn": "nfn", "nfp": "nfp"}[variant])
    per = QueryStats()
    _charge_pe(per, spec.bits)
    scaled.qlsa_ext.charge(eps / (10.0 * math.sqrt(2.0)), per,
                           invocations=2.0 * 2 ** spec.bits + 1.0)
    return per.scaled(reps)


@dataclass
class FindColumnResult:
    column: int | None
    ok: bool
    variant: str
    marked: tuple[int, ...]
    decisions_ok: bool
    stats: QueryStats = field(default_factory=QueryStats)
    skipped_zero: tuple[int, ...] = ()
    reduced_cost_scaled: float | None = None  # c_bar/|(u, c_k)| at the pick


def find_column(scaled: ScaledBasis, eps: float, reps: int = 15,
                mode: str = "analytic", rng: np.random.Generator | None = None,
                stats: QueryStats | None = None, variant: str = "nfn",
                recover_with_nfp: bool = True,
                threshold_shift: float = 0.0) -> FindColumnResult:
    """Grover QSearch over the nonbasic columns for one with certified
    negative reduced cost.

    Marked-set realization: each column's boosted CanEnter decision is
    drawn once per run (bounded-error oracle realization), the QSearch
    dynamics run against that set, and the measured candidate is confirmed
    by a fresh boosted call whose tolerance flags become the run's success
    indicator.  A NotFound under the "nfn" variant retries once with the
    "nfp" variant, which recovers the case of every reduced cost sitting
    inside the indecision window.
    """
    stats = stats if stats is not None else QueryStats()
    domain, skipped = [], []
    for k in scaled.state.nonbasic:
        if scaled.instance.A[:, k].count_nonzero() == 0:
            skipped.append(k)
        else:
            domain.append(k)

    decisions = {}
    all_ok = True
    for k in domain:
        res = can_enter(scaled, k, eps, reps, variant, mode, rng, stats=None,
                        threshold_shift=threshold_shift)
        decisions[k] = res
        all_ok = all_ok and res.ok
    marked = tuple(k for k in domain if decisions[k].value == 1)

    per_call = can_enter_cost(scaled, eps, reps, variant)
    confirm_ok = True
    confirms = 0
    iters_before = stats.grover_iterations

    if mode == "analytic":
        found = qsearch_analytic(domain, marked, stats)
        confirms = 1 if found is not None else 0
    else:
        def confirm(idx: int) -> bool:
            nonlocal confirm_ok, confirms
            confirms += 1
            res = can_enter(scaled, idx, eps, reps, variant, mode, rng,
                            stats=None, threshold_shift=threshold_shift)
            confirm_ok = res.ok
            return res.value == 1

        found = qsearch(domain, marked, rng, stats, confirm=confirm)
    activations = (stats.grover_iterations - iters_before) + confirms
    stats.add(per_call.scaled(activations))

    if found is None and variant == "nfn" and recover_with_nfp:
        retry = find_column(scaled, eps, reps, mode, rng, stats, variant="nfp",
                            recover_with_nfp=False, threshold_shift=threshold_shift)
        return retry
    return FindColumnResult(column=found, ok=confirm_ok and found is not None,
                            variant=variant, marked=marked, decisions_ok=all_ok,
                            stats=stats, skipped_zero=tuple(skipped),
                            reduced_cost_scaled=(
                                decisions[found].reduced_cost_scaled
                                if found is not None else None))


@dataclass(frozen=True)
class IsOptimalResult:
    value: int
    ok: bool
    marked: tuple[int, ...]


def is_optimal(scaled: ScaledBasis, eps: float, reps: int = 15,
               mode: str = "analytic", rng: np.random.Generator | None = None,
               stats: QueryStats | None = None,
               threshold_shift: float = 0.0) -> IsOptimalResult:
    """Counting-Grover existence check over CanEnter with the "nfp"
    sign-estimation variant: returns 1 only when no nonbasic column fires,
    which certifies no column has scaled reduced cost <= -eps.

    An empty nonbasic set is trivially optimal.  The iteration budget is
    the fixed ``3 ceil(pi/4 sqrt(n))`` schedule.
    """
    stats = stats if stats is not None else QueryStats()
    domain = [k for k in scaled.state.nonbasic
              if scaled.instance.A[:, k].count_nonzero() > 0]
    if not domain:
        return IsOptimalResult(value=1, ok=True, marked=())
    decisions = {k: can_enter(scaled, k, eps, reps, "nfp", mode, rng,
                              stats=None, threshold_shift=threshold_shift)
                 for k in domain}
    marked = tuple(k for k in domain if decisions[k].value == 1)
    ok = all(decisions[k].ok for k in domain)
    iters_before = stats.grover_iterations
    exists = grover_count_exists(domain, marked, rng, stats, mode)
    activations = stats.grover_iterations - iters_before
    stats.add(can_enter_cost(scaled, eps, reps, "nfp").scaled(activations))
    return IsOptimalResult(value=int(not exists), ok=ok, marked=marked)


# ---------------------------------------------------------------------------
# unboundedness check and ratio test


@dataclass(frozen=True)
class IsUnboundedResult:
    value: int
    ok: bool
    marked_rows: tuple[int, ...]
    direction_state: np.ndarray     # exact |A_B^-1 A_k> (simulation truth)


def is_unbounded(scaled: ScaledBasis, k: int, delta: float, reps: int = 15,
                 mode: str = "analytic", rng: np.random.Generator | None = None,
                 stats: QueryStats | None = None,
                 threshold_shift: float = 0.0) -> IsUnboundedResult:
    """1 when no component of ``A_B^-1 A_k`` rises above the delta
    threshold: solve at precision delta/10, test each row with the fine
    positive-sign estimation at 9 delta/10 (its 0-return certifies the
    component is below the tolerance), and Grover-count for any firing row.
    """
    stats = stats if stats is not None else QueryStats()
    rhs = scaled.scaled_column(k)
    eps_ls = delta / 10.0
    eps_se = 9.0 * delta / 10.0
    spec = sign_est_spec(eps_se, "nfn_plus", threshold_shift)
    m = scaled.instance.m
    exact = None
    bits_votes: dict[int, BoostedResult] = {}
    for h in range(m):
        adversary = np.zeros(m)
        adversary[h] = 1.0
        sol = scaled.qlsa.solve(rhs, eps_ls, adversary=adversary,
                                threshold=spec.alpha_boundary, charge=False)
        exact = sol.exact
        bits_votes[h] = boosted_sign_est(float(sol.state[h]), eps_se, "nfn_plus",
                                         reps, mode, rng, stats=None,
                                         threshold_shift=threshold_shift)
    marked = tuple(h for h in range(m) if bits_votes[h].value == 1)
    ok = all(bits_votes[h].ok for h in range(m))
    iters_before = stats.grover_iterations
    # a missed marked row turns into a terminal (false) unbounded verdict,
    # so the counting schedule is repeated; each repetition keeps the fixed
    # 3 ceil(pi/4 sqrt(m)) budget
    exists = grover_count_exists(list(range(m)), marked, rng, stats, mode,
                                 schedules=3)
    activations = stats.grover_iterations - iters_before
    per_call = QueryStats()
    _charge_pe(per_call, spec.bits)
    scaled.qlsa.charge(eps_ls, per_call, invocations=2.0 * 2 ** spec.bits + 1.0)
    stats.add(per_call.scaled(reps * max(activations, 1)))
    return IsUnboundedResult(value=int(not exists), ok=ok, marked_rows=marked,
                             direction_state=exact)


@dataclass
class FindRowResult:
    row: int | None
    ok: bool
    failure: str | None
    gated: tuple[int, ...]
    ratio_estimates: np.ndarray
    recovery_options: tuple[str, ...] = ()
    diagnostics: dict = field(default_factory=dict)


def find_row(scaled: ScaledBasis, k: int, delta: float, t: float,
             reps: int = 15, mode: str = "analytic",
             rng: np.random.Generator | None = None,
             stats: QueryStats | None = None,
             threshold_shift: float = 0.0) -> FindRowResult:
    """Approximate ratio-test minimizer (the leaving row).

    Builds solution states for ``A_B y = b`` and ``A_B y = A_k`` at
    precision ``delta/(16 t)``, estimates the two components of every row
    with amplitude estimation at phase precision ``delta/(16 pi t)``, and
    minimizes the estimated ratio over the rows whose denominator passes
    the coarse positive-sign gate at delta/2 (its 1-return certifies the
    scaled component exceeds delta/2).  The returned row satisfies the
    ``(2t+1)/(2t-1)`` relative plus ``2/(2t-1)`` absolute bound against the
    delta-thresholded classical minimum whenever the run's tolerance flags
    hold.  Raw estimates are used as-is (no flooring): a zero denominator
    readout gives an infinite ratio for that row.
    """
    stats = stats if stats is not None else QueryStats()
    m = scaled.instance.m
    rhs_u = scaled.scaled_column(k)
    rhs_b = scaled.state.matrix_scale * scaled.instance.b
    if not np.any(rhs_b):
        raise ZeroColumn("right-hand side b is zero")
    eps_ls = delta / (16.0 * t)
    nu = delta / (16.0 * math.pi * t)
    ae_bits = math.ceil(math.log2(1.0 / nu)) + 2
    gate_eps = delta / 2.0
    gate_spec = sign_est_spec(gate_eps, "nfp_plus", threshold_shift)

    ratios = np.full(m, np.inf)
    gated = []
    all_ok = True
    num_est = np.zeros(m)
    den_est = np.zeros(m)
    exact_u = None
    exact_x = None
    for h in range(m):
        adversary = np.zeros(m)
        adversary[h] = 1.0
        gate_sol = scaled.qlsa.solve(rhs_u, gate_eps, adversary=adversary,
                                     threshold=gate_spec.alpha_boundary,
                                     charge=False)
        exact_u = gate_sol.exact
        scaled.qlsa.charge(gate_eps, stats,
                           invocations=reps * (2.0 * 2 ** gate_spec.bits + 1.0))
        gate = boosted_sign_est(float(gate_sol.state[h]), gate_eps, "nfp_plus",
                                reps, mode, rng, stats=stats,
                                threshold_shift=threshold_shift)
        all_ok = all_ok and gate.ok
        if gate.value != 1:
            continue
        gated.append(h)
        xi = scaled.qlsa.solve(rhs_b, eps_ls, adversary=adversary,
                               threshold=0.0, charge=False)
        psi = scaled.qlsa.solve(rhs_u, eps_ls, adversary=adversary,
                                threshold=0.0, charge=False)
        exact_x = xi.exact
        scaled.qlsa.charge(eps_ls, stats,
                           invocations=2.0 * (2.0 * 2 ** ae_bits + 1.0))
        num = amplitude_estimation(xi.state, h, ae_bits, mode=mode, rng=rng,
                                   stats=stats)
        den = amplitude_estimation(psi.state, h, ae_bits, mode=mode, rng=rng,
                                   stats=stats)
        all_ok = all_ok and num.within(nu) and den.within(nu)
        num_est[h] = num.amp_est
        den_est[h] = den.amp_est
        ratios[h] = num.amp_est / den.amp_est if den.amp_est > 0 else np.inf

    if not gated or not np.any(np.isfinite(ratios)):
        return FindRowResult(
            row=None, ok=all_ok, failure="no_positive_denominator",
            gated=tuple(gated), ratio_estimates=ratios,
            recovery_options=("relax the sign-check tolerance slightly",
                              "flag the instance as numerically unstable"),
            diagnostics={"direction": exact_u})
    row = min_finding(ratios, rng=rng, stats=stats, mode=mode)
    all_ok = all_ok and ratios[row] == ratios[np.argmin(ratios)]
    # the AE quotient estimates the normalized ratio (x_h/|x|)/(u_h/|u|);
    # report the unscaled ratio-test value alongside it
    norm_factor = (np.linalg.norm(np.linalg.solve(scaled.AB, rhs_b))
                   / np.linalg.norm(np.linalg.solve(scaled.AB, rhs_u)))
    return FindRowResult(row=int(row), ok=all_ok, failure=None,
                         gated=tuple(gated), ratio_estimates=ratios,
                         diagnostics={"direction": exact_u, "solution": exact_x,
                                      "numerators": num_est, "denominators": den_est,
                                      "ratio_unscaled": float(ratios[row]) * norm_factor})


# ---------------------------------------------------------------------------
# Frobenius norm estimation (tolerance characterization)


@dataclass(frozen=True)
class NormEstimateResult:
    rho: float              # estimate of |A_Bscaled^-1 A_N|_F^2
    exact: float            # dense-oracle truth for the same quantity
    ok: bool
    amplitude: float        # the success probability fed to AE
    alpha: float
    bits: int


def norm_estimate(scaled: ScaledBasis, eps: float, alpha: float | None = None,
                  mode: str = "analytic", rng: np.random.Generator | None = None,
                  stats: QueryStats | None = None,
                  column: int | None = None) -> NormEstimateResult:
    """Estimate ``|A_B^-1 A_N|_F^2`` (scaled basis) to relative error eps.

    The right-hand-side oracle prepares the Frobenius-weighted column
    superposition; the solver's auxiliary register succeeds with
    probability ``|A~_B^-1 A_N|_F^2 / (alpha^2 |A_N|_F^2)``, which
    amplitude estimation reads out at phase precision ``eps/(4 pi alpha^2)``.
    ``alpha`` is the solver's internal normalization; the ideal oracle
    exposes it as a parameter, default kappa (an upper bound on
    ``|A_B^-1|`` after scaling, so the success amplitude stays <= 1).
    Per-column variant: pass ``column`` to estimate ``|A_B^-1 A_k|^2``.
    """
    stats = stats if stats is not None else QueryStats()
    if alpha is None:
        alpha = scaled.state.kappa
    if column is not None:
        cols = [column]
        eps_ls = eps / 2.0
    else:
        cols = [j for j in scaled.state.nonbasic
                if scaled.instance.A[:, j].count_nonzero() > 0]
        eps_ls = eps / (2.0 * scaled.instance.n)
    if not cols:
        raise ZeroColumn("no nonzero column to estimate over")

    col_norms = np.array([np.linalg.norm(scaled.instance.column(j)) for j in cols])
    sol_norms = np.array([
        np.linalg.norm(np.linalg.solve(scaled.AB, scaled.instance.column(j)))
        for j in cols])
    exact = float((sol_norms ** 2).sum())
    if scaled.error_mode == "worst":
        tilde = sol_norms + eps_ls * col_norms
    elif scaled.error_mode == "random":
        signs = scaled.rng.choice([-1.0, 1.0], size=len(cols))
        tilde = sol_norms + signs * eps_ls * col_norms
    else:
        tilde = sol_norms
    fro2 = float((col_norms ** 2).sum())
    p = float((tilde ** 2).sum() / (alpha ** 2 * fro2))
    p = min(p, 1.0)

    nu = eps / (4.0 * math.pi * alpha ** 2)
    bits = math.ceil(math.log2(1.0 / nu)) + 2
    outcome = amplitude_estimation(np.array([math.sqrt(p), math.sqrt(1 - p)]),
                                   0, bits, mode=mode, rng=rng, stats=stats)
    scaled.qlsa.charge(eps_ls, stats, invocations=2.0 * 2 ** bits + 1.0)
    rho = outcome.amp_est ** 2 * alpha ** 2 * fro2
    return NormEstimateResult(rho=float(rho), exact=exact,
                              ok=outcome.within(nu), amplitude=p,
                              alpha=float(alpha), bits=bits)


# ---------------------------------------------------------------------------
# one simplex iteration and the solve loop


@dataclass
class IterationOutcome:
    """Result of one SimplexIter: Optimal | Unbounded | Pivot(k, row) |
    Failure(kind), plus query counters and cross-check diagnostics."""

    status: str
    entering: int | None = None
    leaving_row: int | None = None
    ok: bool = True
    kappa: float = 0.0
    stats: QueryStats = field(default_factory=QueryStats)
    diagnostics: dict = field(default_factory=dict)


def simplex_iter(instance: LpInstance, basis, params: PrecisionParams,
                 mode: str = "analytic", error_mode: str = "zero",
                 rng: np.random.Generator | None = None,
                 eps_prime: float = 1e-4,
                 threshold_shift: float = 0.0) -> IterationOutcome:
    """One full iteration: normalize, IsOptimal, FindColumn, IsUnbounded,
    FindRow.  An IsOptimal = 1 verdict is only trusted after the
    "nfp"-variant FindColumn re-check comes back empty (the recovery路
    for the indecision window between -2.2 eps and -eps); conversely a
    FindColumn miss under "nfn" retries with "nfp" before declaring the
    basis numerically optimal.
    """
    scaled = ScaledBasis.build(instance, basis, eps_prime=eps_prime,
                               error_mode=error_mode, rng=rng)
    stats = QueryStats()
    diag: dict = {"kappa": scaled.state.kappa}
    opt = is_optimal(scaled, params.eps, params.reps, mode, rng, stats,
                     threshold_shift)
    diag["is_optimal"] = opt.value
    if opt.value == 1:
        recheck = find_column(scaled, params.eps, params.reps, mode, rng, stats,
                              variant="nfp", recover_with_nfp=False,
                              threshold_shift=threshold_shift)
        if recheck.column is None:
            return IterationOutcome("optimal", ok=opt.ok, kappa=scaled.state.kappa,
                                    stats=stats, diagnostics=diag)
        fc = recheck
        diag["is_optimal_overridden"] = True
    else:
        fc = find_column(scaled, params.eps, params.reps, mode, rng, stats,
                         variant="nfn", threshold_shift=threshold_shift)
        if fc.column is None:
            diag["pricing_not_found"] = True
            return IterationOutcome("optimal", ok=fc.decisions_ok,
                                    kappa=scaled.state.kappa, stats=stats,
                                    diagnostics=diag)
    k = fc.column
    diag["entering_variant"] = fc.variant
    diag["reduced_cost_scaled_estimate"] = fc.reduced_cost_scaled
    ub = is_unbounded(scaled, k, params.delta, params.reps, mode, rng, stats,
                      threshold_shift)
    if ub.value == 1:
        return IterationOutcome("unbounded", entering=k, ok=fc.ok and ub.ok,
                                kappa=scaled.state.kappa, stats=stats,
                                diagnostics=diag)
    fr = find_row(scaled, k, params.delta, params.t, params.reps, mode, rng,
                  stats, threshold_shift)
    if fr.row is None:
        diag["recovery_options"] = fr.recovery_options
        return IterationOutcome("failure", entering=k,
                                ok=fc.ok and ub.ok and fr.ok,
                                kappa=scaled.state.kappa, stats=stats,
                                diagnostics=diag)
    diag["ratio_estimate"] = float(fr.ratio_estimates[fr.row])
    diag["ratio_estimate_unscaled"] = fr.diagnostics.get("ratio_unscaled")
    return IterationOutcome("pivot", entering=k, leaving_row=fr.row,
                            ok=fc.ok and ub.ok and fr.ok,
                            kappa=scaled.state.kappa, stats=stats,
                            diagnostics=diag)


@dataclass
class QuantumSolveResult:
    status: str             # "optimal" | "unbounded" | "failure" | "cap"
    basis: tuple[int, ...]
    iterations: int
    objective: float | None
    stats: QueryStats
    outcomes: list[IterationOutcome] = field(default_factory=list)


def solve_quantum(instance: LpInstance, start_basis, params: PrecisionParams,
                  mode: str = "analytic", error_mode: str = "zero",
                  seed: int = 0, max_iters: int | None = None,
                  eps_prime: float = 1e-4, keep_outcomes: bool = True,
                  threshold_shift: float = 0.0) -> QuantumSolveResult:
    """Drive simplex_iter to termination from a feasible start basis."""
    basis = list(start_basis)
    rng = np.random.default_rng(seed)
    cap = max_iters if max_iters is not None else 50 * (instance.m + instance.n)
    total = QueryStats()
    outcomes: list[IterationOutcome] = []
    status = "cap"
    import time
    for _ in range(cap):
        tick = time.perf_counter()
        try:
            out = simplex_iter(instance, basis, params, mode, error_mode, rng,
                               eps_prime, threshold_shift)
        except Exception as exc:  # singular pivot and similar numerical dead ends
            out = IterationOutcome("failure", ok=False,
                                   diagnostics={"error": repr(exc)})
        out.diagnostics["elapsed_ms"] = (time.perf_counter() - tick) * 1e3
        total.add(out.stats)
        if keep_outcomes:
            outcomes.append(out)
        if out.status == "pivot":
            basis[out.leaving_row] = out.entering
            continue
        status = out.status
        break
    objective = None
    if status == "optimal":
        from .classical import basic_solution
        x = basic_solution(instance, basis)
        objective = float(instance.c[list(basis)] @ x)
    return QuantumSolveResult(status=status, basis=tuple(basis),
                              iterations=len(outcomes), objective=objective,
                              stats=total, outcomes=outcomes)
