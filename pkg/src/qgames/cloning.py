"""Quantum channels for copy games: the optimal universal cloner and friends.

The star construction maps an n_in-copy input to the n_out-copy symmetric
subspace,

    rho  ->  (dim_sym(d, n_in) / dim_sym(d, n_out)) *
             P_sym (rho tensor I^{(n_out - n_in)}) P_sym,

realized here by one Kraus operator per computational basis vector of the
padding register.  On product-state inputs its n_out-copy fidelity with the
source state is the constant dim_sym(d, n_in)/dim_sym(d, n_out), and no
channel beats that on Haar average.

Haar-averaged fidelities are evaluated exactly through the Choi matrix: for a
channel J on (input tensor output), the average of
<psi^{m}| ch(psi^{n}) |psi^{m}> over Haar psi is

    tr[ J * PT_in(P_sym^{(n+m)}) ] / dim_sym(d, n+m),

where PT_in transposes the input block, because averaging psi^{tensor(n+m)}
gives the symmetric projector over dim_sym (see symmetric.haar_moment) and the
input factors enter the trace transposed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import (
    DEFAULT_SIZE_CAP,
    DensityOperator,
    InvalidArity,
    PureState,
    RandomStream,
    ShapeError,
    check_size_cap,
    partial_trace_matrix,
    tensor_power,
)
from .symmetric import dim_sym, sym_isometry, sym_projector

COMPLETENESS_ATOL = 1e-10


class Channel:
    """Completely positive map between copy registers, stored as Kraus operators.

    `domain` declares where trace preservation is promised: "full" means
    sum(K^dag K) equals the identity on the whole input space, "symmetric"
    means it equals the identity restricted to the n_in-copy symmetric
    subspace (game inputs are always product states, which live there).
    Completeness and positivity of the cached Choi matrix are verified at
    construction.
    """

    def __init__(self, d, n_in, n_out, kraus, domain="full", atol=COMPLETENESS_ATOL):
        if domain not in ("full", "symmetric"):
            raise ValueError(f"unknown domain {domain!r}")
        self.d = int(d)
        self.n_in = int(n_in)
        self.n_out = int(n_out)
        self.dim_in = self.d**self.n_in
        self.dim_out = self.d**self.n_out
        self.domain = domain
        ops = []
        for k in kraus:
            k = np.asarray(k, dtype=complex)
            if k.shape != (self.dim_out, self.dim_in):
                raise ShapeError(
                    f"Kraus operator shape {k.shape} != ({self.dim_out}, {self.dim_in})"
                )
            k.setflags(write=False)
            ops.append(k)
        if not ops:
            raise ShapeError("channel needs at least one Kraus operator")
        self.kraus = tuple(ops)

        defect = self.completeness_defect()
        if defect > atol:
            raise ValueError(
                f"Kraus operators not trace preserving on {domain} domain "
                f"(defect {defect:.3e} > {atol:.0e})"
            )
        choi = np.zeros((self.dim_in * self.dim_out,) * 2, dtype=complex)
        for k in self.kraus:
            w = k.T.reshape(-1)  # w[(i, a)] = K[a, i]: Choi lives on in (x) out
            choi += np.outer(w, w.conj())
        if np.linalg.eigvalsh(choi).min() < -atol:
            raise ValueError("Choi matrix is not PSD within tolerance")
        choi.setflags(write=False)
        self.choi = choi

    def completeness_defect(self) -> float:
        """Operator-norm distance of sum(K^dag K) from the domain identity."""
        total = sum(k.conj().T @ k for k in self.kraus)
        if self.domain == "full":
            delta = total - np.eye(self.dim_in)
        else:
            iso = sym_isometry(self.d, self.n_in)
            delta = iso.conj().T @ total @ iso - np.eye(iso.shape[1])
        return float(np.linalg.norm(delta, 2))

    def apply_matrix(self, mat: np.ndarray) -> np.ndarray:
        mat = np.asarray(mat, dtype=complex)
        if mat.shape != (self.dim_in, self.dim_in):
            raise ShapeError(f"input shape {mat.shape} != ({self.dim_in}, {self.dim_in})")
        out = np.zeros((self.dim_out, self.dim_out), dtype=complex)
        for k in self.kraus:
            out += k @ mat @ k.conj().T
        return out

    def apply_matrix_via_choi(self, mat: np.ndarray) -> np.ndarray:
        """Same map evaluated through the Choi matrix (cross-check route)."""
        mat = np.asarray(mat, dtype=complex)
        if mat.shape != (self.dim_in, self.dim_in):
            raise ShapeError(f"input shape {mat.shape} != ({self.dim_in}, {self.dim_in})")
        j = self.choi.reshape(self.dim_in, self.dim_out, self.dim_in, self.dim_out)
        return np.einsum("iajb,ij->ab", j, mat)

    def apply(self, rho: DensityOperator) -> DensityOperator:
        return DensityOperator(self.apply_matrix(rho.matrix))

    def __repr__(self):
        return (
            f"Channel(d={self.d}, n_in={self.n_in}, n_out={self.n_out}, "
            f"kraus={len(self.kraus)}, domain={self.domain!r})"
        )


def optimal_cloner(d, n_in, n_out, size_cap=DEFAULT_SIZE_CAP) -> Channel:
    """The optimal universal n_in -> n_out cloner (see module docstring).

    Kraus operators are sqrt(dim ratio) * P_sym * (I tensor |e_i>), one per
    basis vector e_i of the padding register; their completeness on the
    symmetric input subspace follows from the partial-trace identity
    tr_partial(P_sym^{(m)}) = (dim_sym(d,m)/dim_sym(d,n)) P_sym^{(n)}.
    """
    if not 1 <= n_in <= n_out:
        raise InvalidArity(f"need 1 <= n_in <= n_out, got ({n_in}, {n_out})")
    check_size_cap(d ** (n_in + n_out), size_cap)
    proj = sym_projector(d, n_out, size_cap)
    dim_in, dim_out = d**n_in, d**n_out
    pad = d ** (n_out - n_in)
    scale = math.sqrt(dim_sym(d, n_in) / dim_sym(d, n_out))
    kraus = []
    for i in range(pad):
        inject = np.zeros((dim_out, dim_in))
        inject[np.arange(dim_in) * pad + i, np.arange(dim_in)] = 1.0
        kraus.append(scale * (proj @ inject))
    return Channel(d, n_in, n_out, kraus, domain="symmetric")


def product_embedding_channel(d, n_in, n_out) -> Channel:
    """rho -> rho tensor (I/d)^{(n_out - n_in)}: keep the input, pad with noise."""
    if not 1 <= n_in <= n_out:
        raise InvalidArity(f"need 1 <= n_in <= n_out, got ({n_in}, {n_out})")
    dim_in = d**n_in
    pad = d ** (n_out - n_in)
    kraus = []
    for i in range(pad):
        inject = np.zeros((dim_in * pad, dim_in))
        inject[np.arange(dim_in) * pad + i, np.arange(dim_in)] = 1.0 / math.sqrt(pad)
        kraus.append(inject)
    return Channel(d, n_in, n_out, kraus, domain="full")


def mirror_embedding_channel(d, n_in, n_out) -> Channel:
    """rho -> (I/d)^{(n_out - n_in)} tensor rho: noise first, input last."""
    if not 1 <= n_in <= n_out:
        raise InvalidArity(f"need 1 <= n_in <= n_out, got ({n_in}, {n_out})")
    dim_in = d**n_in
    pad = d ** (n_out - n_in)
    kraus = []
    for i in range(pad):
        inject = np.zeros((dim_in * pad, dim_in))
        inject[i * dim_in + np.arange(dim_in), np.arange(dim_in)] = 1.0 / math.sqrt(pad)
        kraus.append(inject)
    return Channel(d, n_in, n_out, kraus, domain="full")


def symmetric_noise_channel(d, n_in, n_out) -> Channel:
    """rho -> tr(rho) * P_sym / dim_sym: maximally mixed on the output Bose space."""
    iso = sym_isometry(d, n_out)
    dim_in = d**n_in
    ds = dim_sym(d, n_out)
    kraus = []
    for c in range(ds):
        for b in range(dim_in):
            k = np.zeros((d**n_out, dim_in), dtype=complex)
            k[:, b] = iso[:, c] / math.sqrt(ds)
            kraus.append(k)
    return Channel(d, n_in, n_out, kraus, domain="full")


def conjugate_output(ch: Channel, unitary: np.ndarray) -> Channel:
    """Compose a channel with a unitary rotation of its output register."""
    unitary = np.asarray(unitary, dtype=complex)
    if unitary.shape != (ch.dim_out, ch.dim_out):
        raise ShapeError(f"unitary shape {unitary.shape} != ({ch.dim_out}, {ch.dim_out})")
    return Channel(ch.d, ch.n_in, ch.n_out, [unitary @ k for k in ch.kraus], domain=ch.domain)


def mixture_channel(a: Channel, b: Channel, weight: float) -> Channel:
    """Convex mixture (1 - weight) * a + weight * b."""
    if (a.d, a.n_in, a.n_out) != (b.d, b.n_in, b.n_out):
        raise ShapeError("cannot mix channels with different arities")
    if not 0.0 <= weight <= 1.0:
        raise ValueError(f"weight {weight} not in [0, 1]")
    kraus = [math.sqrt(1.0 - weight) * k for k in a.kraus]
    kraus += [math.sqrt(weight) * k for k in b.kraus]
    domain = "symmetric" if "symmetric" in (a.domain, b.domain) else "full"
    return Channel(a.d, a.n_in, a.n_out, kraus, domain=domain)


def haar_random_unitary(dim: int, rng: RandomStream) -> np.ndarray:
    """Haar-distributed unitary via phase-fixed QR of a complex Ginibre matrix."""
    z = rng.complex_normals(dim * dim).reshape(dim, dim) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases.conj()


def random_isometry_channel(d, n_in, n_out, rng: RandomStream, ancilla_dim=None) -> Channel:
    """Generic channel: Haar isometry into output tensor ancilla, ancilla dropped.

    Every channel arises this way for a large enough ancilla; ancilla_dim
    defaults to d**n_out, which already covers the cloning-game examples.
    """
    dim_in, dim_out = d**n_in, d**n_out
    anc = dim_out if ancilla_dim is None else int(ancilla_dim)
    u = haar_random_unitary(dim_out * anc, rng)
    iso = u[:, :dim_in].reshape(dim_out, anc, dim_in)
    kraus = [iso[:, a, :] for a in range(anc)]
    return Channel(d, n_in, n_out, kraus, domain="full")


def global_fidelity(ch: Channel, psi: PureState, size_cap=DEFAULT_SIZE_CAP) -> float:
    """<psi^{n_out}| ch(psi^{n_in}) |psi^{n_out}>."""
    if psi.dim != ch.d:
        raise ShapeError(f"state dimension {psi.dim} != local dimension {ch.d}")
    vin = tensor_power(psi, ch.n_in, size_cap).amplitudes
    vout = tensor_power(psi, ch.n_out, size_cap).amplitudes
    total = 0.0
    for k in ch.kraus:
        total += abs(np.vdot(vout, k @ vin)) ** 2
    return float(total)


def _input_transposed_projector(d, n_in, dim_out_block, n_total, size_cap):
    proj = sym_projector(d, n_total, size_cap)
    dim_in = d**n_in
    g = proj.reshape(dim_in, dim_out_block, dim_in, dim_out_block)
    return g.transpose(2, 1, 0, 3).reshape(dim_in * dim_out_block, dim_in * dim_out_block)


def haar_avg_global_fidelity(ch: Channel, size_cap=DEFAULT_SIZE_CAP) -> float:
    """Exact Haar average of global_fidelity via the Choi matrix."""
    n_total = ch.n_in + ch.n_out
    check_size_cap(ch.d**n_total, size_cap)
    g = _input_transposed_projector(ch.d, ch.n_in, ch.dim_out, n_total, size_cap)
    val = np.einsum("ij,ji->", ch.choi, g)
    return float(val.real) / dim_sym(ch.d, n_total)


def single_clone_haar_fidelity(ch: Channel, k: int, size_cap=DEFAULT_SIZE_CAP) -> float:
    """Exact Haar average of <psi| tr_(not k)[ch(psi^{n_in})] |psi>.

    Tracing all output factors except the k-th (1-based) out of the Choi
    matrix yields the Choi matrix of the reduced channel; the average is then
    the (n_in + 1)-copy moment formula on that.
    """
    if not 1 <= k <= ch.n_out:
        raise IndexError(f"clone index {k} not in 1..{ch.n_out}")
    dims = [ch.dim_in] + [ch.d] * ch.n_out
    reduced = partial_trace_matrix(ch.choi, dims, keep=[0, k])
    n_total = ch.n_in + 1
    g = _input_transposed_projector(ch.d, ch.n_in, ch.d, n_total, size_cap)
    val = np.einsum("ij,ji->", reduced, g)
    return float(val.real) / dim_sym(ch.d, n_total)


@dataclass(frozen=True)
class CloningValues:
    """Closed-form game values for the n_in -> n_out cloning games.

    global_value: full-register test, dim_sym(d,N)/dim_sym(d,M).
    single_value: one-particle test, (N(d+M)+M-N) / ((d+N)M).
    asym_bound:   ceiling on the sum of all M single-clone fidelities,
                  (N(d+M)+M-N) / (d+N); no channel may exceed it, else a
                  mixed strategy over clone choices would beat the one-particle
                  game value.
    """

    global_value: float
    single_value: float
    asym_bound: float


def value_formulas(d, n_in, n_out) -> CloningValues:
    """Exact rational game values rendered to floats."""
    if not 1 <= n_in <= n_out:
        raise InvalidArity(f"need 1 <= n_in <= n_out, got ({n_in}, {n_out})")
    gv = Fraction(dim_sym(d, n_in), dim_sym(d, n_out))
    numer = n_in * (d + n_out) + n_out - n_in
    sv = Fraction(numer, (d + n_in) * n_out)
    ab = Fraction(numer, d + n_in)
    return CloningValues(float(gv), float(sv), float(ab))
