"""Interleaved-evolution discrimination games, simulated exactly.

A schedule is a list of rounds (U_j, t_j); a game evolves |0> through

    |psi> -> e^{-i H t_j} U_j |psi>        for j = 1..m

under either the plain Hamiltonian M or the spiked one M + beta Delta, and
asks how well the two final states can be distinguished.  The hybrid chain
interpolates: phi_k uses the plain evolution for the first k rounds and the
spiked one after.  Consecutive hybrids differ only at round k, giving

    delta_k = || (e^{-i M t_k} - e^{-i (M + beta Delta) t_k}) psi_k ||

with psi_k the plain-branch prefix state, and the telescoping bound
total <= sum_k delta_k.  All evolution operators here are exact (diagonal
phases, 2x2 pair blocks, or a cached dense eigendecomposition).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dense_linalg import (
    block_pair_diff_opnorm,
    block_pair_exp_entries,
    eig_hermitian,
)
from .local_case import LocalInstance, SpikeEnsemble, goodness_check
from .worst_case import WorstCaseInstance

MAX_DENSE_N = 14
MAX_BLOCK_N = 22


class DiagonalEvolution:
    """exp(-i diag(g) t) acting by phases."""

    def __init__(self, g: np.ndarray):
        self.g = np.asarray(g, dtype=float)
        self.dim = self.g.size

    def apply(self, state: np.ndarray, t: float) -> np.ndarray:
        return np.exp(-1j * self.g * t) * state


class PairBlockEvolution:
    """exp(-i (diag(g) + beta X_mask) t) through the 2x2 pair blocks."""

    def __init__(self, g: np.ndarray, mask: int, beta: float):
        self.g = np.asarray(g, dtype=float)
        self.mask = int(mask)
        self.beta = float(beta)
        self.dim = self.g.size
        if not 0 < self.mask < self.dim:
            raise ValueError("spike mask out of range")
        hb = 1 << (self.mask.bit_length() - 1)
        b = np.arange(self.dim)
        self.i_idx = b[(b & hb) == 0]
        self.j_idx = self.i_idx ^ self.mask
        self.a = self.g[self.i_idx]
        self.b = self.g[self.j_idx]

    def apply(self, state: np.ndarray, t: float) -> np.ndarray:
        m00, m01, m11 = block_pair_exp_entries(self.a, self.b, self.beta, t)
        out = np.empty_like(state, dtype=complex)
        u = state[self.i_idx]
        v = state[self.j_idx]
        out[self.i_idx] = m00 * u + m01 * v
        out[self.j_idx] = m01 * u + m11 * v
        return out

    def diff_opnorm(self, t: float) -> float:
        """Exact || e^{-i diag(g) t} - e^{-i (diag(g) + beta X) t} ||."""
        return float(block_pair_diff_opnorm(self.a, self.b, self.beta, t).max())


class DenseEvolution:
    """exp(-i H t) with the eigendecomposition cached at construction."""

    def __init__(self, H: np.ndarray):
        self.w, self.V = eig_hermitian(H)
        self.dim = self.w.size

    def apply(self, state: np.ndarray, t: float) -> np.ndarray:
        return (self.V * np.exp(-1j * self.w * t)) @ (self.V.conj().T @ state)


@dataclass
class Round:
    """One interaction round: apply the unitary, then evolve for time t."""

    t: float
    unitary: np.ndarray | None = None  # None means identity


@dataclass
class RoundSchedule:
    rounds: list[Round]
    allow_time_reversal: bool = False

    def __post_init__(self):
        if not self.rounds:
            raise ValueError("schedule must contain at least one round")
        if not self.allow_time_reversal:
            for r in self.rounds:
                if r.t < 0:
                    raise ValueError("negative evolution time without allow_time_reversal")

    @property
    def m(self) -> int:
        return len(self.rounds)

    @property
    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.rounds])


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Gaussian matrix with the
    R-diagonal phases normalized away."""
    Z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def random_schedule(
    dim: int, m: int, seed: int, t_range: tuple[float, float] = (0.0, 4.0)
) -> RoundSchedule:
    """m rounds of independent Haar unitaries and uniform times."""
    rng = np.random.default_rng(np.random.SeedSequence([0x534348, seed]))
    rounds = [
        Round(float(rng.uniform(*t_range)), haar_unitary(dim, rng)) for _ in range(m)
    ]
    return RoundSchedule(rounds)


@dataclass
class GameTranscript:
    m: int
    times: np.ndarray
    deltas: np.ndarray          # per-round hybrid gaps delta_k
    total_dist: float           # || phi_m - phi_0 ||
    final_plain: np.ndarray
    final_spiked: np.ndarray
    helstrom: float
    euclidean_bound: float
    step_opnorms: np.ndarray | None = None      # exact per-round operator norms, when cheap
    prefix_states: list[np.ndarray] | None = field(default=None, repr=False)

    @property
    def delta_sum(self) -> float:
        return float(self.deltas.sum())


def optimal_advantage(s0: np.ndarray, s1: np.ndarray) -> float:
    """Helstrom bias (1/2) sqrt(1 - |<s0|s1>|^2) for two pure states."""
    for s in (s0, s1):
        if abs(np.linalg.norm(s) - 1.0) > 1e-8:
            raise ValueError("states must be normalized")
    ov = abs(np.vdot(s0, s1)) ** 2
    return 0.5 * float(np.sqrt(max(0.0, 1.0 - ov)))


def euclidean_advantage_bound(s0: np.ndarray, s1: np.ndarray) -> float:
    """The cruder bound (1/2) || s0 - s1 ||_2 on the bias."""
    return 0.5 * float(np.linalg.norm(s0 - s1))


def run_game(
    ev_plain,
    ev_spiked,
    schedule: RoundSchedule,
    keep_prefixes: bool = False,
) -> GameTranscript:
    """Exact hybrid-chain simulation of one discrimination game."""
    dim = ev_plain.dim
    if ev_spiked.dim != dim:
        raise ValueError("evolution dimensions differ")
    state0 = np.zeros(dim, dtype=complex)
    state0[0] = 1.0

    plain = state0
    spiked = state0
    deltas = np.empty(schedule.m)
    opnorms = np.empty(schedule.m) if hasattr(ev_spiked, "diff_opnorm") else None
    prefixes: list[np.ndarray] | None = [] if keep_prefixes else None
    for k, rnd in enumerate(schedule.rounds):
        if rnd.unitary is not None:
            plain_pre = rnd.unitary @ plain
            spiked = rnd.unitary @ spiked
        else:
            plain_pre = plain
        if prefixes is not None:
            prefixes.append(plain_pre)
        a = ev_plain.apply(plain_pre, rnd.t)
        b = ev_spiked.apply(plain_pre, rnd.t)
        deltas[k] = np.linalg.norm(a - b)
        if opnorms is not None:
            opnorms[k] = ev_spiked.diff_opnorm(rnd.t)
        plain = a
        spiked = ev_spiked.apply(spiked, rnd.t)
        drift = abs(np.linalg.norm(plain) - 1.0)
        if drift > 1e-10:
            raise RuntimeError(f"norm drift {drift:.2e} in round {k + 1}")
    total = float(np.linalg.norm(plain - spiked))
    return GameTranscript(
        schedule.m,
        schedule.times,
        deltas,
        total,
        plain,
        spiked,
        optimal_advantage(plain, spiked),
        euclidean_advantage_bound(plain, spiked),
        opnorms,
        prefixes,
    )


def evolutions_for(instance, spike_mask: int | None = None):
    """(plain, spiked) evolution pair for either instance family."""
    if isinstance(instance, WorstCaseInstance):
        if instance.n > MAX_BLOCK_N:
            raise ValueError(f"game limited to n <= {MAX_BLOCK_N}")
        g = instance.g.values
        return DiagonalEvolution(g), PairBlockEvolution(g, 1, instance.beta)
    if isinstance(instance, LocalInstance):
        if instance.n > MAX_BLOCK_N:
            raise ValueError(f"game limited to n <= {MAX_BLOCK_N}")
        if spike_mask is None:
            raise ValueError("local instances need a spike mask")
        g = instance.g.values
        return DiagonalEvolution(g), PairBlockEvolution(g, spike_mask, instance.beta)
    raise TypeError(f"unsupported instance type {type(instance).__name__}")


@dataclass
class SearchResult:
    best_total: float
    best_schedule: RoundSchedule
    best_transcript: GameTranscript
    restarts: int
    evaluations: int
    history: list[float]


def adversarial_schedule_search(
    instance,
    m: int,
    restarts: int = 50,
    seed: int = 0,
    iters: int = 60,
    t_range: tuple[float, float] = (1e-3, 1e6),
    use_unitaries: bool = True,
    spike_mask: int | None = None,
    warm_start: RoundSchedule | None = None,
) -> SearchResult:
    """Hill-climbing search for schedules maximizing the total distance.

    Moves perturb one round at a time: evolution times multiplicatively on a
    log scale, unitaries by an elementary two-coordinate rotation.  A warm
    start (padded with identity rounds of zero time) embeds shorter-schedule
    optima, so nested searches are monotone by construction.
    """
    ev0, ev1 = evolutions_for(instance, spike_mask)
    dim = ev0.dim
    rng = np.random.default_rng(np.random.SeedSequence([0x414456, seed]))
    lo, hi = np.log(t_range[0]), np.log(t_range[1])

    def objective(ts, us):
        sched = RoundSchedule([Round(float(t), u) for t, u in zip(ts, us)])
        return run_game(ev0, ev1, sched).total_dist, sched

    best = None
    evals = 0
    history: list[float] = []
    for restart in range(restarts + (1 if warm_start is not None else 0)):
        if warm_start is not None and restart == 0:
            ts = [r.t for r in warm_start.rounds]
            us = [r.unitary for r in warm_start.rounds]
            ts += [0.0] * (m - len(ts))
            us += [None] * (m - len(us))
            if len(ts) != m:
                raise ValueError("warm start longer than m")
        else:
            ts = list(np.exp(rng.uniform(lo, hi, size=m)))
            us = [haar_unitary(dim, rng) if use_unitaries else None for _ in range(m)]
        cur, sched = objective(ts, us)
        evals += 1
        for _ in range(iters):
            j = int(rng.integers(m))
            if (not use_unitaries) or rng.uniform() < 0.5 or us[j] is None:
                t_old = ts[j]
                ts[j] = float(
                    np.clip(
                        np.exp(np.log(max(t_old, t_range[0])) + rng.normal(0.0, 0.7)),
                        t_range[0],
                        t_range[1],
                    )
                )
                cand, csched = objective(ts, us)
                evals += 1
                if cand > cur:
                    cur, sched = cand, csched
                else:
                    ts[j] = t_old
            else:
                u_old = us[j]
                p, q = rng.choice(dim, size=2, replace=False)
                th = rng.normal(0.0, 0.3)
                ph = rng.uniform(0.0, 2.0 * np.pi)
                rot = np.eye(dim, dtype=complex)
                rot[p, p] = np.cos(th)
                rot[p, q] = -np.sin(th) * np.exp(1j * ph)
                rot[q, p] = np.sin(th) * np.exp(-1j * ph)
                rot[q, q] = np.cos(th)
                us[j] = u_old @ rot
                cand, csched = objective(ts, us)
                evals += 1
                if cand > cur:
                    cur, sched = cand, csched
                else:
                    us[j] = u_old
        if best is None or cur > best[0]:
            tr = run_game(ev0, ev1, sched)
            best = (cur, sched, tr)
        history.append(best[0])
    assert best is not None
    return SearchResult(best[0], best[1], best[2], restarts, evals, history)


@dataclass
class AverageCaseReport:
    n: int
    k: int
    c: int
    m: int
    samples: int
    mean_total: float
    se_total: float
    per_step_envelope: float      # max over samples and rounds of delta_k / beta
    envelope_bound: float         # m * beta * per_step_envelope
    envelope_satisfied: bool
    projector_diag_exact: bool    # ensemble-averaged projector diagonal == goodness fractions
    quadratic_form_gap: float     # worst |direct - via-averaged-projector| over prefixes
    totals: np.ndarray


def average_case_game(
    inst: LocalInstance,
    schedule: RoundSchedule,
    n_samples: int,
    seed: int,
    threshold_exponent: float = 0.1,
) -> AverageCaseReport:
    """Monte-Carlo over the spike ensemble, plus two exact cross-checks.

    The ensemble-averaged small-gap projector is diagonal; its diagonal must
    agree with the goodness fractions entry for entry (both are the same
    integer counts), and the averaged quadratic form on each plain-branch
    prefix state must match the direct per-spike average.
    """
    if inst.n > MAX_DENSE_N:
        raise ValueError(f"average-case game limited to n <= {MAX_DENSE_N}")
    ens = SpikeEnsemble(inst.n, inst.c)
    g = inst.g.values
    ev0 = DiagonalEvolution(g)
    plain_transcript = run_game(ev0, PairBlockEvolution(g, int(ens.masks[0]), inst.beta),
                                schedule, keep_prefixes=True)
    prefixes = plain_transcript.prefix_states
    assert prefixes is not None

    report = goodness_check(inst, threshold_exponent)
    theta = report.threshold
    idx = np.arange(g.size)
    counts = np.zeros(g.size, dtype=np.int64)
    quad_direct = np.zeros(len(prefixes))
    for mask in ens.masks:
        member = np.abs(g - g[idx ^ mask]) <= theta
        counts += member
        for k, psi in enumerate(prefixes):
            quad_direct[k] += float(np.sum(np.abs(psi[member]) ** 2))
    avg_diag = counts / len(ens)
    quad_direct /= len(ens)
    diag_exact = bool(np.array_equal(avg_diag, report.fractions))
    quad_via_avg = np.array([float(np.sum(avg_diag * np.abs(psi) ** 2)) for psi in prefixes])
    quad_gap = float(np.abs(quad_direct - quad_via_avg).max())

    rng = np.random.default_rng(np.random.SeedSequence([0x41564E, seed]))
    masks = ens.sample(rng, n_samples)
    totals = np.empty(n_samples)
    env = 0.0
    for i, mask in enumerate(masks):
        tr = run_game(ev0, PairBlockEvolution(g, int(mask), inst.beta), schedule)
        totals[i] = tr.total_dist
        env = max(env, float(tr.deltas.max()) / inst.beta)
    mean = float(totals.mean())
    se = float(totals.std(ddof=1) / np.sqrt(n_samples)) if n_samples > 1 else 0.0
    bound = schedule.m * inst.beta * env
    return AverageCaseReport(
        inst.n,
        inst.k,
        inst.c,
        schedule.m,
        n_samples,
        mean,
        se,
        env,
        bound,
        bool(mean <= bound + 3.0 * se + 1e-12),
        diag_exact,
        quad_gap,
        totals,
    )
