"""Experiments tying the quantum strategies to finite game theory.

Discretized matrix games restrict both players to finite strategy sets; the
restricted value can only fall as the column player's set grows, and it is
pinned from below by any row whose payoff is constant, so refining the state
sets sandwiches the theoretical game value.  Monte Carlo play runs the actual
referee protocol round by round, and the brute-force scan checks the
asymmetric-cloning fidelity-sum ceiling over random channels.

Analytic reports quote fidelities F; the protocol's literal stakes are +-1.
A round passes with probability p = (1 + F)/2, so the mean +-1 payoff is
2p - 1 = F: the empirical mean payoff estimates the mean fidelity directly.
Monte Carlo records carry the mean payoff and the raw pass rate side by side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cloning import (
    Channel,
    global_fidelity,
    haar_avg_global_fidelity,
    haar_random_unitary,
    conjugate_output,
    mirror_embedding_channel,
    mixture_channel,
    optimal_cloner,
    product_embedding_channel,
    random_isometry_channel,
    single_clone_haar_fidelity,
    symmetric_noise_channel,
    value_formulas,
)
from .core import (
    DEFAULT_SIZE_CAP,
    PureState,
    RandomStream,
    ShapeError,
    check_size_cap,
    partial_trace_matrix,
    tensor_power,
)
from .estimation import (
    Direction,
    Povm,
    bloch_state,
    fibonacci_directions,
    mean_fidelity,
    pointwise_payoff,
)
from .zerosum import EquilibriumPair, MatrixGame, MixedStrategy, solve
from .core import haar_random_state

GAME_KINDS = ("estimation", "cloning", "one_particle")


@dataclass(frozen=True)
class GameSpec:
    """What to play: which game, at which arity, for how many rounds."""

    kind: str
    d: int = 2
    n: int = 1
    m: int = 1
    samples: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in GAME_KINDS:
            raise ValueError(f"kind must be one of {GAME_KINDS}, got {self.kind!r}")
        if self.kind == "estimation":
            if self.d != 2:
                raise ValueError("estimation strategies are implemented for qubits only")
            if self.n < 1:
                raise ValueError("estimation needs n >= 1 copies")
        else:
            if not 1 <= self.n <= self.m:
                raise ValueError(f"cloning arity needs 1 <= n <= m, got ({self.n}, {self.m})")
        if self.samples < 0:
            raise ValueError("samples must be nonnegative")

    def theoretical_value(self) -> float:
        if self.kind == "estimation":
            return (self.n + 1) / (self.n + 2)
        values = value_formulas(self.d, self.n, self.m)
        return values.global_value if self.kind == "cloning" else values.single_value


# ---------------------------------------------------------------------------
# deterministic state sets (column-player discretizations)

_GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def icosahedral_states() -> list[PureState]:
    """The 12 icosahedron vertices as qubit states (a well-spread Bloch set)."""
    verts = []
    for a in (-1.0, 1.0):
        for b in (-_GOLDEN, _GOLDEN):
            verts += [(0.0, a, b), (a, b, 0.0), (b, 0.0, a)]
    states = []
    for v in verts:
        x, y, z = np.array(v) / np.linalg.norm(v)
        theta = math.acos(max(-1.0, min(1.0, z)))
        psi = math.atan2(y, x) % (2.0 * math.pi)
        states.append(bloch_state(Direction(theta, psi)))
    return states


def fibonacci_states(count: int) -> list[PureState]:
    return [bloch_state(d) for d in fibonacci_directions(count)]


def haar_states(d: int, count: int, rng: RandomStream) -> list[PureState]:
    return [haar_random_state(d, rng.substream(i)) for i in range(count)]


def nested_state_sets(states, sizes) -> list[list[PureState]]:
    """Prefixes of one ordered state list, so refinement levels truly nest."""
    states = list(states)
    sizes = sorted(int(s) for s in sizes)
    if sizes[-1] > len(states):
        raise ValueError(f"largest size {sizes[-1]} exceeds {len(states)} states")
    return [states[:s] for s in sizes]


def default_state_sets(d: int, sizes, rng: RandomStream | None = None):
    """Fibonacci prefixes for qubits, Haar-sample prefixes above."""
    top = max(int(s) for s in sizes)
    if d == 2:
        return nested_state_sets(fibonacci_states(top), sizes)
    if rng is None:
        raise ValueError("state sets for d > 2 are sampled and need a RandomStream")
    return nested_state_sets(haar_states(d, top, rng), sizes)


# ---------------------------------------------------------------------------
# discretized matrix games

def discretize_estimation_game(n_copies: int, povms, states) -> MatrixGame:
    """A[i, j] = mean payoff of povms[i] against states[j] (fixed frames)."""
    povms = list(povms)
    states = list(states)
    if not povms or not states:
        raise ShapeError("need at least one strategy per player")
    a = np.empty((len(povms), len(states)))
    for i, povm in enumerate(povms):
        if povm.n != n_copies:
            raise ShapeError(f"povm copy count {povm.n} != {n_copies}")
        for j, psi in enumerate(states):
            a[i, j] = pointwise_payoff(povm, psi)
    return MatrixGame(a)


def discretize_cloning_game(d, n_in, n_out, channels, states) -> MatrixGame:
    """A[i, j] = global fidelity of channels[i] on states[j]."""
    channels = list(channels)
    states = list(states)
    if not channels or not states:
        raise ShapeError("need at least one strategy per player")
    a = np.empty((len(channels), len(states)))
    for i, ch in enumerate(channels):
        if (ch.d, ch.n_in, ch.n_out) != (d, n_in, n_out):
            raise ShapeError(f"channel arity {(ch.d, ch.n_in, ch.n_out)} != {(d, n_in, n_out)}")
        for j, psi in enumerate(states):
            a[i, j] = global_fidelity(ch, psi)
    return MatrixGame(a)


@dataclass(frozen=True)
class SandwichLevel:
    n_states: int
    value: float
    exploitability: float


@dataclass(frozen=True)
class SandwichReport:
    """Restricted game values across nested column refinements."""

    kind: str
    theoretical_value: float
    levels: tuple
    lower_bound_ok: bool
    monotone_ok: bool
    converged: bool
    tol: float

    @property
    def passed(self) -> bool:
        return self.lower_bound_ok and self.monotone_ok and self.converged


def sandwich_report(spec: GameSpec, player_i, player_ii_sets, tol: float = 1e-9) -> SandwichReport:
    """Solve the restricted game at each refinement level and check the sandwich.

    `player_ii_sets` must be nested (each level a superset of the previous);
    then the value is non-increasing, stays above the theoretical value as
    long as player I's set contains an optimal (constant-row) strategy, and
    converges onto it once the finest set pins every other row down.
    """
    player_i = list(player_i)
    levels = []
    for states in player_ii_sets:
        if spec.kind == "estimation":
            game = discretize_estimation_game(spec.n, player_i, states)
        elif spec.kind == "cloning":
            game = discretize_cloning_game(spec.d, spec.n, spec.m, player_i, states)
        else:
            raise ValueError("sandwich_report supports estimation and cloning games")
        eq = solve(game, tol=min(tol, 1e-9))
        levels.append(SandwichLevel(len(states), eq.value, eq.exploitability))
    theory = spec.theoretical_value()
    lower = all(lv.value >= theory - tol for lv in levels)
    monotone = all(
        levels[i + 1].value <= levels[i].value + tol for i in range(len(levels) - 1)
    )
    converged = abs(levels[-1].value - theory) <= tol
    return SandwichReport(
        spec.kind, theory, tuple(levels), lower, monotone, converged, tol
    )


# ---------------------------------------------------------------------------
# perturbation evidence for the equilibrium claim

@dataclass(frozen=True)
class PerturbationReport:
    base_value: float
    n_perturbations: int
    max_value: float
    violations: int
    tol: float

    @property
    def passed(self) -> bool:
        return self.violations == 0


def _haar_value(strategy) -> float:
    if isinstance(strategy, Channel):
        return haar_avg_global_fidelity(strategy)
    if isinstance(strategy, Povm):
        return mean_fidelity(strategy)
    raise TypeError(f"unsupported strategy type {type(strategy).__name__}")


def perturb_best_response_check(base, perturbations, tol: float = 1e-9) -> PerturbationReport:
    """No perturbation's Haar-averaged payoff may beat the base strategy's."""
    base_value = _haar_value(base)
    max_value = -np.inf
    violations = 0
    count = 0
    for strategy in perturbations:
        value = _haar_value(strategy)
        max_value = max(max_value, value)
        if value > base_value + tol:
            violations += 1
        count += 1
    if count == 0:
        raise ValueError("no perturbations supplied")
    return PerturbationReport(base_value, count, float(max_value), violations, tol)


def cloner_perturbations(ch: Channel, count: int, rng: RandomStream) -> list[Channel]:
    """Output-unitary kicks alternating with mixes toward symmetric noise."""
    noise = symmetric_noise_channel(ch.d, ch.n_in, ch.n_out)
    out = []
    for i in range(count):
        stream = rng.substream(i)
        if i % 2 == 0:
            u = haar_random_unitary(ch.dim_out, stream)
            out.append(conjugate_output(ch, u))
        else:
            eps = 0.05 + 0.95 * stream.uniform()
            out.append(mixture_channel(ch, noise, eps))
    return out


def povm_perturbations(povm: Povm, count: int, rng: RandomStream) -> list[Povm]:
    """Misalign the guesses: per-guess unitary kicks and common rotations."""
    out = []
    for i in range(count):
        stream = rng.substream(i)
        if i % 2 == 0:
            guesses = tuple(
                PureState(haar_random_unitary(2, stream.substream(r)) @ g.amplitudes)
                for r, g in enumerate(povm.guesses)
            )
        else:
            u = haar_random_unitary(2, stream)
            guesses = tuple(PureState(u @ g.amplitudes) for g in povm.guesses)
        out.append(Povm(povm.n, povm.effects, guesses))
    return out


# ---------------------------------------------------------------------------
# Monte Carlo protocol play

@dataclass(frozen=True)
class MonteCarloRecord:
    """Empirical +-1 payoff of full protocol rounds.

    The referee passes with probability (1 + F)/2, so mean_payoff = 2p - 1
    estimates the mean fidelity F itself; pass_rate is the raw pass frequency
    (1 + mean_payoff)/2.
    """

    kind: str
    samples: int
    seed: int
    mean_payoff: float
    stderr_payoff: float
    pass_rate: float


def _estimation_round(povm: Povm, stream: RandomStream) -> int:
    psi = haar_random_state(2, stream)
    probs = povm.outcome_probabilities(psi)
    total = probs.sum()
    draw = stream.uniform() * total
    outcome = int(np.searchsorted(np.cumsum(probs), draw))
    outcome = min(outcome, len(probs) - 1)
    guess = povm.guesses[outcome]
    p_pass = 0.5 * (1.0 + psi.overlap_probability(guess))
    return 1 if stream.uniform() < p_pass else -1


def _cloning_round(ch: Channel, stream: RandomStream) -> int:
    psi = haar_random_state(ch.d, stream)
    vin = tensor_power(psi, ch.n_in).amplitudes
    vout = tensor_power(psi, ch.n_out).amplitudes
    fid = sum(abs(np.vdot(vout, k @ vin)) ** 2 for k in ch.kraus)
    p_pass = 0.5 * (1.0 + fid)
    return 1 if stream.uniform() < p_pass else -1


def _one_particle_round(ch: Channel, stream: RandomStream) -> int:
    psi = haar_random_state(ch.d, stream)
    clone = int(stream.generator.integers(1, ch.n_out + 1))
    vin = tensor_power(psi, ch.n_in).amplitudes
    dims = [ch.d] * ch.n_out
    reduced = np.zeros((ch.d, ch.d), dtype=complex)
    for k in ch.kraus:
        branch = np.outer(k @ vin, (k @ vin).conj())
        reduced += partial_trace_matrix(branch, dims, keep=[clone - 1])
    fid = float(np.vdot(psi.amplitudes, reduced @ psi.amplitudes).real)
    p_pass = 0.5 * (1.0 + fid)
    return 1 if stream.uniform() < p_pass else -1


def monte_carlo_play(spec: GameSpec, strategy, seed=None) -> MonteCarloRecord:
    """Play `spec.samples` protocol rounds; reproducible via per-round substreams."""
    if spec.samples < 1:
        raise ValueError("samples must be >= 1")
    check_size_cap(spec.d ** max(spec.n, spec.m))
    seed = spec.seed if seed is None else int(seed)
    root = RandomStream(seed)
    if spec.kind == "estimation":
        play = lambda s: _estimation_round(strategy, s)
    elif spec.kind == "cloning":
        play = lambda s: _cloning_round(strategy, s)
    else:
        play = lambda s: _one_particle_round(strategy, s)
    total = 0
    for i in range(spec.samples):
        total += play(root.substream(i))
    mean = total / spec.samples
    # outcomes are +-1, so the sample variance is exactly 1 - mean^2
    stderr = math.sqrt(max(0.0, 1.0 - mean * mean) / spec.samples)
    return MonteCarloRecord(spec.kind, spec.samples, seed, mean, stderr, 0.5 * (1.0 + mean))


# ---------------------------------------------------------------------------
# asymmetric-cloning bound scan

@dataclass(frozen=True)
class ScanRecord:
    kind: str  # "random" | "grid" | "optimal"
    label: str
    fidelities: tuple
    sum_fidelity: float


@dataclass(frozen=True)
class ScanReport:
    max_sum_fidelity: float
    bound: float
    argmax: str
    records: tuple
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_sum_fidelity <= self.bound + self.tol


def _scan_channel(ch: Channel, kind: str, label: str) -> ScanRecord:
    if ch.completeness_defect() > 1e-8:
        raise ValueError(f"channel {label} is not trace preserving; refusing to scan")
    fids = tuple(single_clone_haar_fidelity(ch, k) for k in range(1, ch.n_out + 1))
    return ScanRecord(kind, label, fids, float(sum(fids)))


def asymmetry_grid_channels(d: int, grid_points: int) -> list[tuple[float, Channel]]:
    """Path from (input, noise) through the optimal 1->2 cloner to (noise, input).

    Two convex legs: t in [0, 1/2] mixes the keep-the-first embedding into the
    optimal cloner, t in [1/2, 1] mixes the optimal cloner into the mirrored
    embedding.  Every point is a valid channel and t = 1/2 is exactly optimal.
    """
    first = product_embedding_channel(d, 1, 2)
    mirror = mirror_embedding_channel(d, 1, 2)
    best = optimal_cloner(d, 1, 2)
    out = []
    for t in np.linspace(0.0, 1.0, grid_points):
        t = float(t)
        if t <= 0.5:
            out.append((t, mixture_channel(first, best, 2.0 * t)))
        else:
            out.append((t, mixture_channel(best, mirror, 2.0 * (t - 0.5))))
    return out


def asym_bound_scan(
    d: int,
    n_in: int,
    n_out: int,
    n_random: int,
    grid_points: int = 21,
    seed: int = 0,
    ancilla_dim=None,
    tol: float = 1e-9,
) -> ScanReport:
    """Brute-force search for a violation of the fidelity-sum ceiling.

    Scans Haar-random isometry channels plus (for 1 -> 2) the asymmetry grid
    and the optimal cloner itself, which attains the bound exactly.
    """
    check_size_cap(d ** (n_in + n_out))
    bound = value_formulas(d, n_in, n_out).asym_bound
    root = RandomStream(seed)
    records = [_scan_channel(optimal_cloner(d, n_in, n_out), "optimal", "optimal-cloner")]
    for i in range(n_random):
        ch = random_isometry_channel(d, n_in, n_out, root.substream(i), ancilla_dim)
        records.append(_scan_channel(ch, "random", f"random-{i}"))
    if (n_in, n_out) == (1, 2) and grid_points > 0:
        for t, ch in asymmetry_grid_channels(d, grid_points):
            records.append(_scan_channel(ch, "grid", f"grid-t={t:.6f}"))
    best = max(records, key=lambda r: r.sum_fidelity)
    return ScanReport(best.sum_fidelity, bound, best.label, tuple(records), tol)
