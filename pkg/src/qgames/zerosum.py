"""Finite two-player zero-sum matrix games.

The row player maximizes entry A[i, j]; the column player receives the
negation.  `solve` produces an (x, y, value) triple whose exploitability
(best-response gap) is below the requested tolerance.

Two solution engines:

* an exact simplex over Fractions.  Shift the payoffs so every entry is >= 1;
  then the column player's program is  max sum(w)  s.t.  A'w <= 1, w >= 0,
  whose origin is feasible, so one Phase-2 simplex with Bland's rule finishes
  it.  The optimal w rescales to y, the slack reduced costs rescale to x, and
  value = 1/sum(w) shifted back.  Exact arithmetic keeps the equilibrium
  certificate at rounding error, which the refinement experiments need.

* regret matching (the plus variant with alternating updates and linearly
  weighted averaging), kept for games past the exact-size limit and for
  sampling distinct equilibria of degenerate games from different seeds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

#: Largest side length handed to the exact simplex by method="auto".
EXACT_SIZE_LIMIT = 64


class NonConvergence(RuntimeError):
    """Iterative solver hit its iteration cap; carries the achieved gap."""

    def __init__(self, message, exploitability):
        super().__init__(message)
        self.exploitability = exploitability


class NotAGroup(ValueError):
    """The supplied column action is not closed or lacks the identity."""


class CovarianceViolation(ValueError):
    """The payoff matrix does not intertwine the row map with the action."""


@dataclass(frozen=True)
class MatrixGame:
    """Real payoff matrix; rows belong to the maximizing player."""

    payoff: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.payoff, dtype=float)
        if mat.ndim != 2 or mat.shape[0] < 1 or mat.shape[1] < 1:
            raise ValueError(f"payoff must be a nonempty matrix, got shape {mat.shape}")
        if not np.all(np.isfinite(mat)):
            raise ValueError("payoff entries must be finite")
        mat.setflags(write=False)
        object.__setattr__(self, "payoff", mat)

    @property
    def shape(self):
        return self.payoff.shape


@dataclass(frozen=True)
class MixedStrategy:
    """Probability vector over pure strategies."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).reshape(-1)
        if p.size == 0:
            raise ValueError("strategy must be nonempty")
        if p.min() < -1e-12:
            raise ValueError(f"negative probability {p.min()!r}")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        p = np.clip(p, 0.0, None)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @classmethod
    def pure(cls, size: int, index: int) -> "MixedStrategy":
        p = np.zeros(size)
        p[index] = 1.0
        return cls(p)

    @classmethod
    def uniform(cls, size: int) -> "MixedStrategy":
        return cls(np.full(size, 1.0 / size))

    def total_variation(self, other: "MixedStrategy") -> float:
        return 0.5 * float(np.abs(self.probs - other.probs).sum())


@dataclass(frozen=True)
class EquilibriumPair:
    x: MixedStrategy
    y: MixedStrategy
    value: float
    exploitability: float


def exploitability(game: MatrixGame, x: MixedStrategy, y: MixedStrategy) -> float:
    """Best-response gap: max_i (Ay)_i - min_j (x^T A)_j; zero iff equilibrium."""
    a = game.payoff
    if x.probs.size != a.shape[0] or y.probs.size != a.shape[1]:
        raise ValueError(
            f"strategy sizes ({x.probs.size}, {y.probs.size}) do not match game {a.shape}"
        )
    return float((a @ y.probs).max() - (x.probs @ a).min())


def best_response(game: MatrixGame, opponent: MixedStrategy, side: str) -> int:
    """Best pure reply for `side` ("I" rows / "II" columns); ties -> lowest index."""
    a = game.payoff
    if side == "I":
        if opponent.probs.size != a.shape[1]:
            raise ValueError("opponent strategy does not match column count")
        return int(np.argmax(a @ opponent.probs))
    if side == "II":
        if opponent.probs.size != a.shape[0]:
            raise ValueError("opponent strategy does not match row count")
        return int(np.argmin(opponent.probs @ a))
    raise ValueError(f"side must be 'I' or 'II', got {side!r}")


def _pair(game, x_probs, y_probs):
    x = MixedStrategy(x_probs)
    y = MixedStrategy(y_probs)
    value = float(x.probs @ game.payoff @ y.probs)
    gap = max(0.0, exploitability(game, x, y))
    return EquilibriumPair(x, y, value, gap)


def _exact_simplex(payoff):
    """Exact equilibrium of  max_x min_y x^T A y  via one rational simplex."""
    m, n = payoff.shape
    shift = Fraction(float(payoff.min())) - 1
    rows = [[Fraction(float(payoff[i, j])) - shift for j in range(n)] for i in range(m)]

    # Tableau for max sum(w) s.t. rows @ w <= 1, w >= 0 (slack basis start).
    # Columns: n originals, m slacks, rhs.  Cost row holds reduced costs of
    # the minimization of -sum(w); its rhs accumulates -objective.
    width = n + m + 1
    tab = []
    for i in range(m):
        row = rows[i] + [Fraction(0)] * m + [Fraction(1)]
        row[n + i] = Fraction(1)
        tab.append(row)
    cost = [Fraction(-1)] * n + [Fraction(0)] * (m + 1)
    basis = list(range(n, n + m))

    while True:
        enter = next((j for j in range(n + m) if cost[j] < 0), None)  # Bland
        if enter is None:
            break
        leave, best = None, None
        for i in range(m):
            coef = tab[i][enter]
            if coef > 0:
                ratio = tab[i][width - 1] / coef
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            raise RuntimeError("unbounded program; payoff shift failed")
        piv = tab[leave][enter]
        tab[leave] = [v / piv for v in tab[leave]]
        for i in range(m):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [a - f * b for a, b in zip(tab[i], tab[leave])]
        if cost[enter] != 0:
            f = cost[enter]
            cost = [a - f * b for a, b in zip(cost, tab[leave])]
        basis[leave] = enter

    w = [Fraction(0)] * n
    for i, b in enumerate(basis):
        if b < n:
            w[b] = tab[i][width - 1]
    u = cost[n : n + m]  # dual solution: reduced costs of the slacks
    total = sum(w)  # equals sum(u) by strong duality; positive since A' >= 1
    value = 1 / total + shift
    x = np.array([float(ui / total) for ui in u])
    y = np.array([float(wj / total) for wj in w])
    return x / x.sum(), y / y.sum(), float(value)


def _regret_matching(payoff, tol, max_iterations, seed, check_every=64):
    """Regret matching plus: alternating updates, linear averaging."""
    m, n = payoff.shape
    if seed is None:
        regret_x = np.zeros(m)
        regret_y = np.zeros(n)
    else:
        gen = np.random.default_rng(int(seed))
        regret_x = gen.random(m) * 1e-3
        regret_y = gen.random(n) * 1e-3
    x_acc = np.zeros(m)
    y_acc = np.zeros(n)
    game = MatrixGame(payoff)

    def normalized(regret, size):
        pos = np.clip(regret, 0.0, None)
        total = pos.sum()
        return pos / total if total > 0 else np.full(size, 1.0 / size)

    achieved = np.inf
    for t in range(1, max_iterations + 1):
        y = normalized(regret_y, n)
        payoff_x = payoff @ y
        x = normalized(regret_x, m)
        regret_x = np.clip(regret_x + payoff_x - x @ payoff_x, 0.0, None)
        x = normalized(regret_x, m)
        payoff_y = -(x @ payoff)
        regret_y = np.clip(regret_y + payoff_y - y @ payoff_y, 0.0, None)
        x_acc += t * x
        y_acc += t * normalized(regret_y, n)
        if t % check_every == 0 or t == max_iterations:
            x_avg = x_acc / x_acc.sum()
            y_avg = y_acc / y_acc.sum()
            achieved = exploitability(game, MixedStrategy(x_avg), MixedStrategy(y_avg))
            if achieved <= tol:
                return x_avg, y_avg
    raise NonConvergence(
        f"regret matching reached exploitability {achieved:.3e} > tol {tol:.0e} "
        f"after {max_iterations} iterations",
        achieved,
    )


def solve(
    game: MatrixGame,
    tol: float = 1e-9,
    method: str = "auto",
    max_iterations: int = 1_000_000,
    seed=None,
) -> EquilibriumPair:
    """Equilibrium with exploitability <= tol.

    method="auto" uses closed forms for single-row/column games, the exact
    simplex up to EXACT_SIZE_LIMIT, and regret matching beyond; "exact" and
    "regret" force an engine.  Regret matching raises NonConvergence (with the
    achieved gap attached) if the cap runs out first.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = game.payoff
    m, n = a.shape
    if m == 1:
        j = int(np.argmin(a[0]))
        return _pair(game, np.ones(1), np.eye(n)[j])
    if n == 1:
        i = int(np.argmax(a[:, 0]))
        return _pair(game, np.eye(m)[i], np.ones(1))
    if method not in ("auto", "exact", "regret"):
        raise ValueError(f"unknown method {method!r}")
    if method == "exact" or (method == "auto" and max(m, n) <= EXACT_SIZE_LIMIT):
        x, y, _ = _exact_simplex(a)
        return _pair(game, x, y)
    x, y = _regret_matching(a, tol, max_iterations, seed)
    return _pair(game, x, y)


def _compose(p, q):
    return tuple(p[q[c]] for c in range(len(p)))


def symmetrize(game: MatrixGame, column_action, row_map) -> MixedStrategy:
    """Average a best reply over a symmetry group acting on the columns.

    `column_action` lists the group elements as permutations of the column
    indices; closure under composition and the identity element are verified
    (a closed finite permutation set containing the identity is a group, since
    powers of each element cycle back through the identity).  `row_map[g][e]`
    names the row that plays against column f the way row e plays against the
    moved column g(f); the payoff must satisfy
    A[row_map[g][e], f] = A[e, g(f)], which is verified entrywise.

    The returned strategy mixes the moved copies of a best reply to the
    uniform column strategy.  Its payoff is constant along every orbit of the
    action; when the action is transitive (one orbit, e.g. cyclic shifts),
    the whole payoff row is constant: the strategy is universal.
    """
    a = game.payoff
    m, n = a.shape
    perms = [tuple(int(v) for v in p) for p in column_action]
    if not perms:
        raise NotAGroup("empty action")
    for p in perms:
        if sorted(p) != list(range(n)):
            raise NotAGroup(f"{p} is not a permutation of {n} columns")
    seen = set(perms)
    if len(seen) != len(perms):
        raise NotAGroup("duplicate group elements")
    if tuple(range(n)) not in seen:
        raise NotAGroup("identity permutation missing")
    for g in perms:
        for h in perms:
            if _compose(g, h) not in seen:
                raise NotAGroup(f"composition {_compose(g, h)} escapes the set: not closed")

    rmap = np.asarray(row_map, dtype=int)
    if rmap.shape != (len(perms), m):
        raise ValueError(f"row_map shape {rmap.shape} != ({len(perms)}, {m})")
    if rmap.min() < 0 or rmap.max() >= m:
        raise ValueError("row_map entries out of range")
    for gi, g in enumerate(perms):
        lhs = a[rmap[gi], :]
        rhs = a[:, list(g)]
        worst = float(np.max(np.abs(lhs - rhs)))
        if worst > 1e-12:
            raise CovarianceViolation(
                f"payoff identity fails for group element {gi} by {worst:.3e}"
            )

    reply = best_response(game, MixedStrategy.uniform(n), "I")
    probs = np.zeros(m)
    for gi in range(len(perms)):
        probs[rmap[gi][reply]] += 1.0 / len(perms)
    return MixedStrategy(probs)


@dataclass(frozen=True)
class InterchangeReport:
    """Outcome of crossing two equilibrium pairs."""

    passed: bool
    inputs_ok: bool
    input_exploitabilities: tuple
    cross_exploitabilities: tuple
    values: tuple
    value_spread: float
    tol: float
    factor: float = 10.0  # documented slack multiplier on tol


def interchange_check(
    game: MatrixGame,
    pair1: EquilibriumPair,
    pair2: EquilibriumPair,
    tol: float,
) -> InterchangeReport:
    """Verify the swapped pairs (x1, y2), (x2, y1) are equilibria too.

    Both input pairs are expected to have exploitability <= tol; the crossed
    pairs and the four value agreements are allowed 10x tol.  Nothing raises:
    the report carries any failure, including bad inputs.
    """
    factor = 10.0
    a = game.payoff
    inputs = (
        exploitability(game, pair1.x, pair1.y),
        exploitability(game, pair2.x, pair2.y),
    )
    inputs_ok = max(inputs) <= tol
    e12 = exploitability(game, pair1.x, pair2.y)
    e21 = exploitability(game, pair2.x, pair1.y)
    values = (
        float(pair1.x.probs @ a @ pair1.y.probs),
        float(pair2.x.probs @ a @ pair2.y.probs),
        float(pair1.x.probs @ a @ pair2.y.probs),
        float(pair2.x.probs @ a @ pair1.y.probs),
    )
    spread = max(values) - min(values)
    passed = (
        inputs_ok
        and e12 <= factor * tol
        and e21 <= factor * tol
        and spread <= factor * tol
    )
    return InterchangeReport(passed, inputs_ok, inputs, (e12, e21), values, spread, tol, factor)


def rock_paper_scissors() -> MatrixGame:
    """The canonical cyclic game; its unique equilibrium is uniform/uniform."""
    return MatrixGame(np.array([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]]))


def circulant_game(generator_row) -> MatrixGame:
    """Game with A[e, f] = r[(f - e) mod n]; covariant under the cyclic action."""
    r = np.asarray(generator_row, dtype=float).reshape(-1)
    n = r.size
    a = np.empty((n, n))
    for e in range(n):
        for f in range(n):
            a[e, f] = r[(f - e) % n]
    return MatrixGame(a)


def cyclic_action(n: int):
    """Z_n acting on columns by shifts, with the matching row map.

    Returns (perms, row_map): perms[g][c] = (g + c) mod n and
    row_map[g][e] = (e - g) mod n, which satisfy the symmetrize() covariance
    identity for every circulant game.
    """
    perms = [tuple((g + c) % n for c in range(n)) for g in range(n)]
    row_map = [[(e - g) % n for e in range(n)] for g in range(n)]
    return perms, row_map
