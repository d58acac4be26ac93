"""Qubit state estimation: measure n copies, send back one guess qubit.

Strategies are POVMs on the (n+1)-dimensional symmetric subspace of the copy
register, each outcome paired with a guess state.  Effects are weighted
projectors onto rotated spin-coherent vectors; the weights must tile the
identity of the symmetric subspace (completeness), which we solve for by
nonnegative least squares over any supplied direction set.

Why completeness alone pins the mean fidelity at (n+1)/(n+2) for aligned
guesses: each effect c_r |Phi_r><Phi_r| embeds into the full copy space as c_r
times the projector onto phi_r^{tensor n}; tensoring on the aligned guess
appends one more phi_r, giving c_r times the projector onto
phi_r^{tensor (n+1)}, which the (n+1)-copy symmetric projector fixes.  The
Haar-averaged payoff is therefore sum_r c_r / dim_sym(2, n+1), and taking the
trace of the completeness condition gives sum_r c_r = n + 1 while
dim_sym(2, n+1) = n + 2.

A single finite POVM is not universal: its payoff depends on the input state
(e.g. the two-outcome n=1 measurement scores 1 on its own axis but 1/2 on the
equator).  The equilibrium strategy re-draws the whole direction frame
uniformly at random each round, which flattens the payoff to the Haar mean for
every input.  `design_directions` reproduces that flattening with a fixed
frame by making the weighted directions an exact degree-(n+1) quadrature on
the sphere, so the payoff operator itself tiles the (n+1)-copy symmetric
projector and the per-state payoff is constant to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

from .core import (
    DensityOperator,
    PureState,
    ShapeError,
    _frozen,
    tensor_power,
)
from .symmetric import SymBasis, dim_sym, sym_projector


class IncompletePovm(ValueError):
    """The direction set cannot tile the symmetric-subspace identity."""


@dataclass(frozen=True)
class Direction:
    """Point on the Bloch sphere: polar angle theta, azimuthal phase psi."""

    theta: float
    psi_phase: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta {self.theta} not in [0, pi]")
        if not 0.0 <= self.psi_phase < 2.0 * math.pi:
            raise ValueError(f"psi_phase {self.psi_phase} not in [0, 2 pi)")


def bloch_state(direction: Direction) -> PureState:
    """Qubit along the given Bloch direction.

    Uses the symmetric phase split (e^{-i psi/2} cos(theta/2),
    e^{+i psi/2} sin(theta/2)), i.e. the rotation e^{-i psi Jz} e^{-i theta Jy}
    applied to |0>, so that n-fold tensor powers match `measurement_vector`
    exactly rather than up to a global phase.
    """
    half = 0.5 * direction.theta
    phase = 0.5 * direction.psi_phase
    amp = np.array(
        [math.cos(half) * np.exp(-1j * phase), math.sin(half) * np.exp(1j * phase)]
    )
    return PureState(amp)


def wigner_d_top(two_j: int, two_m: int, theta: float) -> float:
    """Highest-weight column of the spin-j rotation about the y axis.

    Indices are doubled to stay integral.  Returns
    sqrt(binom(2j, j+m)) cos(theta/2)^{j+m} sin(theta/2)^{j-m}, the (m, j)
    entry of expm(-i theta Jy) in the m-descending basis; that matrix
    exponential is the sign convention (oracle-checked in the tests), and any
    other convention only re-phases the measurement vectors, which cancels in
    the effects.
    """
    if two_j < 0 or (two_j + two_m) % 2 != 0 or not -two_j <= two_m <= two_j:
        raise IndexError(f"invalid doubled index two_m={two_m} for two_j={two_j}")
    kp = (two_j + two_m) // 2
    km = (two_j - two_m) // 2
    return (
        math.sqrt(math.comb(two_j, kp))
        * math.cos(0.5 * theta) ** kp
        * math.sin(0.5 * theta) ** km
    )


def measurement_vector(n_copies: int, direction: Direction) -> PureState:
    """Spin-coherent vector of a direction in the symmetric basis.

    Component at magnetic index m (descending, m = n/2 - k) is
    e^{-i psi m} d^{n/2}_{m, n/2}(theta); this equals the symmetric-basis
    coordinates of bloch_state(direction)^{tensor n}.
    """
    if n_copies < 1:
        raise ValueError("need at least one copy")
    amps = np.empty(n_copies + 1, dtype=complex)
    for k in range(n_copies + 1):
        two_m = n_copies - 2 * k
        amps[k] = np.exp(-0.5j * direction.psi_phase * two_m) * wigner_d_top(
            n_copies, two_m, direction.theta
        )
    return PureState(amps / np.linalg.norm(amps))


@dataclass(frozen=True)
class Povm:
    """Measure-and-resend strategy: effects on the symmetric subspace plus guesses.

    Effects must be PSD within 1e-10 and sum to the identity within 1e-8
    (Frobenius); `completeness_residual` records the actual defect.
    """

    n: int
    effects: tuple
    guesses: tuple

    def __post_init__(self):
        dim = self.n + 1
        effects = []
        for e in self.effects:
            e = np.asarray(e, dtype=complex)
            if e.shape != (dim, dim):
                raise ShapeError(f"effect shape {e.shape} != ({dim}, {dim})")
            if np.linalg.eigvalsh(e).min() < -1e-10:
                raise ValueError("effect has an eigenvalue below -1e-10")
            effects.append(_frozen(e))
        if len(effects) != len(self.guesses):
            raise ShapeError("one guess per effect required")
        for g in self.guesses:
            if g.dim != 2:
                raise ShapeError("guesses must be qubits")
        object.__setattr__(self, "effects", tuple(effects))
        object.__setattr__(self, "guesses", tuple(self.guesses))
        residual = float(
            np.linalg.norm(sum(self.effects) - np.eye(dim), "fro")
        )
        object.__setattr__(self, "_residual", residual)
        if residual > 1e-8:
            raise IncompletePovm(
                f"effects sum to identity only within {residual:.3e} (> 1e-8); "
                "add more directions"
            )

    @property
    def completeness_residual(self) -> float:
        return self._residual

    def outcome_probabilities(self, psi: PureState) -> np.ndarray:
        """Born probabilities tr[E_r rho] for the n-copy input psi^{tensor n}."""
        if psi.dim != 2:
            raise ShapeError("input must be a qubit")
        amp = SymBasis(2, self.n).compress(tensor_power(psi, self.n).amplitudes)
        probs = np.array([np.vdot(amp, e @ amp).real for e in self.effects])
        return np.clip(probs, 0.0, None)


def default_directions(n_copies: int) -> list[Direction]:
    """Direction set used when the caller has no opinion.

    n = 1 gets the antipodal pair; larger n gets (n+1)^2 golden-angle spiral
    points, enough for the weight solver to tile the identity.
    """
    if n_copies < 1:
        raise ValueError("need at least one copy")
    if n_copies == 1:
        return [Direction(0.0, 0.0), Direction(math.pi, 0.0)]
    return fibonacci_directions((n_copies + 1) ** 2)


def fibonacci_directions(count: int) -> list[Direction]:
    """Golden-angle spiral points; the azimuth doubles as the frame phase."""
    golden = math.pi * (3.0 - math.sqrt(5.0))
    out = []
    for i in range(count):
        z = 1.0 - (2.0 * i + 1.0) / count
        theta = math.acos(max(-1.0, min(1.0, z)))
        psi = math.fmod(i * golden, 2.0 * math.pi)
        out.append(Direction(theta, psi))
    return out


def design_directions(n_copies: int) -> tuple[list[Direction], np.ndarray]:
    """Weighted directions that integrate degree-(n+1) sphere polynomials exactly.

    Gauss-Legendre nodes in cos(theta) crossed with n+2 equispaced azimuths:
    the product rule integrates every monomial of degree <= n+1 in the Bloch
    components, hence sum_r w_r proj(phi_r^{tensor (n+1)}) equals the
    (n+1)-copy Haar moment to rounding.  Weights sum to 1.
    """
    k = n_copies + 1
    q = k // 2 + 1  # Gauss-Legendre is exact through degree 2q - 1 >= k
    nodes, gl_weights = np.polynomial.legendre.leggauss(q)
    p = k + 1  # uniform azimuths kill e^{i j psi} for 0 < |j| <= k
    dirs, weights = [], []
    for x, w in zip(nodes, gl_weights):
        theta = math.acos(max(-1.0, min(1.0, float(x))))
        for a in range(p):
            dirs.append(Direction(theta, 2.0 * math.pi * a / p))
            weights.append(w / (2.0 * p))
    return dirs, np.array(weights)


def build_povm(n_copies: int, directions, tol: float = 1e-8) -> Povm:
    """Solve for nonnegative weights making the direction projectors complete.

    Minimizes the Frobenius defect || sum_r c_r |Phi_r><Phi_r| - I || over
    c_r >= 0 (nonnegative least squares); raises IncompletePovm when the
    residual exceeds `tol`.  Guesses are the directions themselves.
    """
    directions = list(directions)
    vectors = [measurement_vector(n_copies, d).amplitudes for d in directions]
    projectors = [np.outer(v, v.conj()) for v in vectors]
    dim = n_copies + 1
    design = np.empty((2 * dim * dim, len(projectors)))
    for r, proj in enumerate(projectors):
        design[: dim * dim, r] = proj.reshape(-1).real
        design[dim * dim :, r] = proj.reshape(-1).imag
    target = np.concatenate([np.eye(dim).reshape(-1), np.zeros(dim * dim)])
    weights, residual = nnls(design, target)
    if residual > tol:
        raise IncompletePovm(
            f"completeness residual {residual:.3e} exceeds tol {tol:.0e}; "
            f"supply more than {len(directions)} directions"
        )
    effects = [c * proj for c, proj in zip(weights, projectors)]
    guesses = [bloch_state(d) for d in directions]
    return Povm(n_copies, tuple(effects), tuple(guesses))


def universal_povm(n_copies: int) -> Povm:
    """POVM whose fixed frame already plays like the frame-randomized strategy.

    Built from `design_directions`: weights c_r = (n+1) w_r are exactly
    complete (trace out one copy of the degree-(n+1) identity), and the
    payoff against every pure state equals (n+1)/(n+2) up to rounding.
    """
    dirs, weights = design_directions(n_copies)
    vectors = [measurement_vector(n_copies, d).amplitudes for d in dirs]
    effects = [
        (n_copies + 1) * w * np.outer(v, v.conj()) for w, v in zip(weights, vectors)
    ]
    guesses = [bloch_state(d) for d in dirs]
    return Povm(n_copies, tuple(effects), tuple(guesses))


def respond(povm: Povm, psi: PureState) -> DensityOperator:
    """The averaged state sent back: sum_r tr[E_r rho] |phi_r><phi_r|."""
    probs = povm.outcome_probabilities(psi)
    sigma = np.zeros((2, 2), dtype=complex)
    for p, guess in zip(probs, povm.guesses):
        sigma += p * np.outer(guess.amplitudes, guess.amplitudes.conj())
    return DensityOperator(sigma)


def pointwise_payoff(povm: Povm, psi: PureState) -> float:
    """Expected +-1 payoff of one fixed-frame round against psi."""
    probs = povm.outcome_probabilities(psi)
    return float(
        sum(p * psi.overlap_probability(g) for p, g in zip(probs, povm.guesses))
    )


def payoff_operator(povm: Povm) -> np.ndarray:
    """sum_r (embedded E_r) tensor |phi_r><phi_r| on the (n+1)-copy space."""
    basis = SymBasis(2, povm.n)
    total = np.zeros((2 ** (povm.n + 1),) * 2, dtype=complex)
    for e, g in zip(povm.effects, povm.guesses):
        guess_proj = np.outer(g.amplitudes, g.amplitudes.conj())
        total += np.kron(basis.embed_operator(e), guess_proj)
    return total


def mean_fidelity(povm: Povm) -> float:
    """Exact Haar-averaged payoff, tr[W P_sym] / dim_sym over n+1 copies."""
    k = povm.n + 1
    w = payoff_operator(povm)
    val = np.einsum("ij,ji->", w, sym_projector(2, k))
    return float(val.real) / dim_sym(2, k)


def frame_averaged_payoff(povm: Povm, psi: PureState) -> float:
    """Expected payoff against psi when the frame is re-drawn Haar each round.

    Requires aligned guesses so the payoff operator W lives inside the
    (n+1)-copy symmetric subspace; the uniform frame twirl then reduces W to
    its overlap with the projector (the subspace is irreducible under
    collective rotations), giving mean_fidelity times the symmetric overlap
    of psi^{tensor (n+1)} - which is 1 for product states.
    """
    k = povm.n + 1
    w = payoff_operator(povm)
    proj = sym_projector(2, k)
    off = np.linalg.norm(w - proj @ w @ proj, 2)
    if off > 1e-8:
        raise ValueError(
            "payoff operator leaks out of the symmetric subspace "
            f"(norm {off:.3e}); frame averaging needs aligned guesses"
        )
    flat = float(np.einsum("ij,ji->", w, proj).real) / dim_sym(2, k)
    v = tensor_power(psi, k).amplitudes
    return flat * float(np.vdot(v, proj @ v).real)
