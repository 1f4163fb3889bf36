"""Exact state-vector engine for the multi-walker discrete-time walk.

Each walker lives on its own square with vertices labelled 00, 10, 11, 01
(clockwise) and carries a two-level coin.  A walker's basis index is
b = 4c + 2x + y, and the global index packs walkers with P0 least
significant; the external walker, when present, is most significant.
Operators are applied in place over strided views, so a five- or
six-walker step costs a few passes over the amplitude array.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Optional

import numpy as np

from .pauli import PEX, PauliWord

ATOL = 1e-12

# Vertex labels in clockwise order; v = 2x + y.
VERTEX_LABELS = ("00", "10", "11", "01")
V_OF_LABEL = {"00": 0, "10": 2, "11": 3, "01": 1}
LABEL_OF_V = {v: k for k, v in V_OF_LABEL.items()}
CLOCKWISE = (0, 2, 3, 1)
V_SUCC = {0: 2, 2: 3, 3: 1, 1: 0}  # one clockwise step

# Per-walker shift permutation on b = 4c + v: coin 1 advances clockwise.
_SHIFT_PERM = np.zeros(8, dtype=np.int64)
for _v in range(4):
    _SHIFT_PERM[_v] = _v
    _SHIFT_PERM[4 + _v] = 4 + V_SUCC[_v]
# Gather indices: new[b] = old[_SHIFT_GATHER[b]].
_SHIFT_GATHER = np.argsort(_SHIFT_PERM)

# Named 2x2 coin operators.
COIN_I = np.eye(2, dtype=complex)
COIN_X = np.array([[0, 1], [1, 0]], dtype=complex)
COIN_Z = np.array([[1, 0], [0, -1]], dtype=complex)
COIN_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
COIN_HP = (COIN_X - COIN_Z) / np.sqrt(2)  # H' = (X - Z)/sqrt(2)
COIN_S = np.diag(np.exp([-1j * np.pi / 4, 1j * np.pi / 4]))   # exp(-i pi/4 Z)
COIN_T = np.diag(np.exp([1j * np.pi / 8, -1j * np.pi / 8]))   # exp(+i pi/8 Z)

_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": COIN_X,
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": COIN_Z,
}


def is_unitary(u: np.ndarray, atol: float = ATOL) -> bool:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=atol))


@dataclass(frozen=True)
class Layout:
    """Walker arrangement: nested squares P0..P(n-1), optional external.

    Nested neighbors are the pairs (i, i+1); they interact at equal coin
    and equal vertex.  The external walker is adjacent to the outermost
    nested walker and interacts only at (PEX@10, P4@00) and
    (PEX@11, P4@01), again with equal coins.
    """

    num_nested: int = 5
    with_external: bool = False

    def __post_init__(self):
        if self.num_nested < 1:
            raise ValueError("layout needs at least one walker")
        if self.with_external and self.num_nested != 5:
            raise ValueError("external walker is only supported on the 5-walker layout")

    @property
    def particles(self) -> tuple:
        ps = tuple(range(self.num_nested))
        return ps + (PEX,) if self.with_external else ps

    @property
    def num_particles(self) -> int:
        return self.num_nested + (1 if self.with_external else 0)

    @property
    def dim(self) -> int:
        return 8 ** self.num_particles

    def slot(self, particle: int) -> int:
        """Position of a walker in the index packing (P0 = 0)."""
        if particle == PEX:
            if not self.with_external:
                raise ValueError("layout has no external walker")
            return self.num_nested
        if not 0 <= particle < self.num_nested:
            raise ValueError(f"walker {particle} not in layout")
        return particle

    def nested_pairs(self) -> tuple:
        return tuple((i, i + 1) for i in range(self.num_nested - 1))


FIVE = Layout(5, False)
SIX = Layout(5, True)


@lru_cache(maxsize=8)
def _neighbor_diag(layout: Layout) -> np.ndarray:
    """Diagonal of the neighbor interaction: -1 per matching adjacent pair."""
    idx = np.arange(layout.dim, dtype=np.int64)
    count = np.zeros(layout.dim, dtype=np.int64)
    b = {p: (idx >> (3 * layout.slot(p))) & 7 for p in layout.particles}
    for i, j in layout.nested_pairs():
        count += (b[i] == b[j]).astype(np.int64)
    if layout.with_external:
        bx, b4 = b[PEX], b[4]
        for coin in (0, 4):
            # PEX at 10 with P4 at 00, and PEX at 11 with P4 at 01.
            count += ((bx == coin + 2) & (b4 == coin + 0)).astype(np.int64)
            count += ((bx == coin + 3) & (b4 == coin + 1)).astype(np.int64)
    return np.where(count % 2 == 1, -1.0, 1.0)


@lru_cache(maxsize=8)
def _zero_index(layout: Layout) -> np.ndarray:
    return np.arange(layout.dim, dtype=np.int64)


@lru_cache(maxsize=8)
def _shift_gather_flat(layout: Layout) -> np.ndarray:
    """Flat gather indices applying the global shift in one pass."""
    idx = _zero_index(layout)
    src = np.zeros(layout.dim, dtype=np.int64)
    for p in layout.particles:
        shift_amt = 3 * layout.slot(p)
        src |= _SHIFT_GATHER[(idx >> shift_amt) & 7] << shift_amt
    return src


@lru_cache(maxsize=256)
def _coin_slices(layout: Layout, particle: int, vertex_v: int) -> tuple:
    """Flat indices of the coin-0 and coin-1 components at one vertex."""
    idx = _zero_index(layout)
    b = (idx >> (3 * layout.slot(particle))) & 7
    return (np.nonzero(b == vertex_v)[0], np.nonzero(b == vertex_v + 4)[0])


@lru_cache(maxsize=16)
def _coin_one_indices(layout: Layout, particle: int) -> np.ndarray:
    idx = _zero_index(layout)
    bit = 1 << (3 * layout.slot(particle) + 2)
    return np.nonzero((idx & bit) != 0)[0]


class StateVector:
    """Complex amplitudes over the walkers' (coin, vertex) product basis."""

    __slots__ = ("layout", "amps")

    def __init__(self, layout: Layout, amps: np.ndarray):
        if amps.shape != (layout.dim,):
            raise ValueError(f"amplitude array must have shape ({layout.dim},)")
        self.layout = layout
        self.amps = amps

    def copy(self) -> "StateVector":
        return StateVector(self.layout, self.amps.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def check_norm(self, atol: float = ATOL) -> None:
        if abs(self.norm() - 1.0) > atol:
            raise ValueError(f"state norm deviates from 1 by {abs(self.norm()-1.0):.3e}")

    def axis(self, particle: int) -> int:
        # numpy axes run most-significant first
        return self.layout.num_particles - 1 - self.layout.slot(particle)

    def view(self) -> np.ndarray:
        return self.amps.reshape((8,) * self.layout.num_particles)

    def __repr__(self):
        return f"StateVector(particles={self.layout.particles}, dim={self.layout.dim})"


def init_state(layout: Layout, placements: Iterable[tuple]) -> StateVector:
    """Basis state with each walker at (coin, vertex-label)."""
    placed = {}
    for particle, coin, vertex in placements:
        if particle in placed:
            raise ValueError(f"duplicate placement for walker {particle}")
        if coin not in (0, 1):
            raise ValueError(f"coin must be 0 or 1, got {coin}")
        placed[particle] = 4 * coin + V_OF_LABEL[vertex]
    missing = set(layout.particles) - set(placed)
    if missing or set(placed) - set(layout.particles):
        raise ValueError(f"placements must cover the layout exactly (missing {sorted(missing)})")
    flat = 0
    for particle, b in placed.items():
        flat |= b << (3 * layout.slot(particle))
    amps = np.zeros(layout.dim, dtype=complex)
    amps[flat] = 1.0
    return StateVector(layout, amps)


def all_at_origin(layout: Layout) -> StateVector:
    return init_state(layout, [(p, 0, "00") for p in layout.particles])


class CoinSpec:
    """Vertex-conditioned coin operators, one 2x2 unitary per (walker, vertex).

    Entries default to the identity; only non-identity entries are stored
    and applied.
    """

    def __init__(self, entries: Optional[Mapping[tuple, np.ndarray]] = None):
        self.entries: dict[tuple, np.ndarray] = {}
        if entries:
            for (particle, vertex), u in entries.items():
                self.set(particle, vertex, u)

    def set(self, particle: int, vertex: str, u: np.ndarray) -> "CoinSpec":
        u = np.asarray(u, dtype=complex)
        if u.shape != (2, 2) or not is_unitary(u):
            raise ValueError(f"coin entry for ({particle}, {vertex}) is not a 2x2 unitary")
        if not np.allclose(u, COIN_I, atol=ATOL):
            self.entries[(particle, V_OF_LABEL[vertex])] = u
        return self

    @staticmethod
    def uniform(particles: Iterable[int], u: np.ndarray) -> "CoinSpec":
        spec = CoinSpec()
        for p in particles:
            for label in VERTEX_LABELS:
                spec.set(p, label, u)
        return spec

    def items(self):
        return self.entries.items()

    def is_identity(self) -> bool:
        return not self.entries

    def describe(self) -> str:
        if not self.entries:
            return "identity"
        bits = []
        for (p, v), u in sorted(self.entries.items()):
            name = _coin_name(u)
            bits.append(f"P{p}@{LABEL_OF_V[v]}:{name}")
        return ",".join(bits)


def _coin_name(u: np.ndarray) -> str:
    for name, ref in (("X", COIN_X), ("Z", COIN_Z), ("H", COIN_H), ("H'", COIN_HP),
                      ("S", COIN_S), ("T", COIN_T), ("I", COIN_I)):
        if np.allclose(u, ref, atol=ATOL):
            return name
    return "U"


def _coin_inplace(state: StateVector, particle: int, vertex_v: int, u: np.ndarray) -> None:
    i0, i1 = _coin_slices(state.layout, particle, vertex_v)
    a0 = state.amps[i0]
    a1 = state.amps[i1]
    state.amps[i0] = u[0, 0] * a0 + u[0, 1] * a1
    state.amps[i1] = u[1, 0] * a0 + u[1, 1] * a1


def apply_coin(state: StateVector, spec: CoinSpec, inplace: bool = False) -> StateVector:
    """Apply the vertex-conditioned coin update to every walker."""
    out = state if inplace else state.copy()
    for (particle, v), u in spec.entries.items():
        _coin_inplace(out, particle, v, u)
    return out


def apply_local_coin(state: StateVector, particle: int, u: np.ndarray,
                     inplace: bool = False) -> StateVector:
    """Apply one 2x2 unitary to a walker's coin at every vertex."""
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u):
        raise ValueError("local coin operator must be unitary")
    out = state if inplace else state.copy()
    for v in range(4):
        _coin_inplace(out, particle, v, u)
    return out


def apply_shift(state: StateVector, inplace: bool = False) -> StateVector:
    """Coin-1 components advance one clockwise vertex; coin-0 stay put."""
    amps = state.amps[_shift_gather_flat(state.layout)]
    if inplace:
        state.amps = amps
        return state
    return StateVector(state.layout, amps)


def apply_neighbor(state: StateVector, inplace: bool = False) -> StateVector:
    """Phase -1 on components where adjacent walkers match (coin and vertex)."""
    diag = _neighbor_diag(state.layout)
    if inplace:
        state.amps *= diag
        return state
    return StateVector(state.layout, state.amps * diag)


def apply_particle_unitary(state: StateVector, particle: int, u8: np.ndarray,
                           inplace: bool = False) -> StateVector:
    """Apply an 8x8 unitary to one walker's (coin, vertex) factor."""
    u8 = np.asarray(u8, dtype=complex)
    if u8.shape != (8, 8) or not is_unitary(u8):
        raise ValueError("walker operator must be an 8x8 unitary")
    ax = state.axis(particle)
    view = state.view()
    moved = np.moveaxis(view, ax, 0)
    new = np.tensordot(u8, moved, axes=([1], [0]))
    amps = np.moveaxis(new, 0, ax).reshape(-1)
    if inplace:
        state.amps[:] = amps
        return state
    return StateVector(state.layout, amps)


def _word_masks(layout: Layout, word: PauliWord) -> tuple:
    """(xmask, zmask, phase) for applying a Pauli word on this layout."""
    xmask = 0
    zmask = 0
    phase_pow = word.phase_pow
    role_bit = {"y": 0, "x": 1, "c": 2}
    for qubit, letter in word.ops:
        bit = 1 << (3 * layout.slot(qubit.particle) + role_bit[qubit.role])
        if letter in ("X", "Y"):
            xmask |= bit
        if letter in ("Z", "Y"):
            zmask |= bit
        if letter == "Y":
            phase_pow += 1
    return xmask, zmask, (1j) ** (phase_pow % 4)


def _parity(values: np.ndarray) -> np.ndarray:
    v = values.copy()
    for shift in (16, 8, 4, 2, 1):
        v ^= v >> shift
    return v & 1


def apply_pauli_word(state: StateVector, word: PauliWord) -> StateVector:
    """Apply a signed Pauli word; exact (no matrix is materialized)."""
    xmask, zmask, phase = _word_masks(state.layout, word)
    idx = _zero_index(state.layout)
    src = idx ^ xmask if xmask else idx
    amps = state.amps[src].astype(complex, copy=True)
    if zmask:
        signs = 1.0 - 2.0 * _parity(src & zmask)
        amps *= signs
    if phase != 1:
        amps *= phase
    return StateVector(state.layout, amps)


def expectation(state: StateVector, word: PauliWord) -> float:
    """<state| word |state> for a Hermitian word."""
    if not word.is_hermitian():
        raise ValueError("expectation requires a Hermitian word (real phase)")
    val = np.vdot(state.amps, apply_pauli_word(state, word).amps)
    if abs(val.imag) > 1e-10:
        raise AssertionError(f"expectation of Hermitian word came out complex: {val}")
    return float(val.real)


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, global-phase invariant."""
    if a.amps.shape != b.amps.shape:
        raise ValueError("fidelity requires equal dimensions")
    return float(abs(np.vdot(a.amps, b.amps)) ** 2)


def project_pauli(state: StateVector, word: PauliWord, sign: int,
                  tol: float = 1e-12) -> tuple:
    """Project onto the +/-1 eigenspace of a Hermitian involution.

    Returns (normalized post-projection state, pre-projection probability).
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if not word.is_hermitian():
        raise ValueError("projection requires a Hermitian word")
    moved = apply_pauli_word(state, word)
    amps = 0.5 * (state.amps + sign * moved.amps)
    prob = float(np.vdot(amps, amps).real)
    if prob < tol:
        raise ValueError(f"projection onto {sign:+d} eigenspace has probability {prob:.3e}")
    return StateVector(state.layout, amps / np.sqrt(prob)), prob


def coin_one_probability(state: StateVector, particle: int) -> float:
    ones = _coin_one_indices(state.layout, particle)
    a = state.amps[ones]
    return float(np.real(np.vdot(a, a)))


def _collapse_coin(state: StateVector, particle: int, outcome: int, prob: float) -> StateVector:
    ones = _coin_one_indices(state.layout, particle)
    amps = state.amps.copy()
    if outcome:
        full = np.zeros_like(amps)
        full[ones] = amps[ones]
        amps = full
    else:
        amps[ones] = 0.0
    amps /= np.sqrt(prob)
    return StateVector(state.layout, amps)


def measure_coin(state: StateVector, particle: int, *,
                 rng: Optional[np.random.Generator] = None,
                 forced: Optional[int] = None,
                 both_branches: bool = False,
                 tol: float = 1e-12):
    """Projective Z-basis measurement of a walker's coin.

    Policies: seeded random (pass ``rng``), forced outcome, or both
    branches.  Both-branches returns [(bit, state, probability), ...] with
    zero-probability branches dropped; the others return a single triple.
    """
    p1 = coin_one_probability(state, particle)
    probs = {0: 1.0 - p1, 1: p1}
    if both_branches:
        return [(b, _collapse_coin(state, particle, b, probs[b]), probs[b])
                for b in (0, 1) if probs[b] > tol]
    if forced is not None:
        if probs[forced] < tol:
            raise ValueError(f"forced outcome {forced} has probability {probs[forced]:.3e}")
        return forced, _collapse_coin(state, particle, forced, probs[forced]), probs[forced]
    if rng is None:
        raise ValueError("measure_coin needs an rng, a forced outcome, or both_branches=True")
    bit = int(rng.random() < p1)
    return bit, _collapse_coin(state, particle, bit, probs[bit]), probs[bit]


def position_distribution(state: StateVector, particle: int) -> np.ndarray:
    """Marginal probability over the four vertices (indexed by v)."""
    ax = state.axis(particle)
    view = np.abs(state.view()) ** 2
    axes = tuple(i for i in range(view.ndim) if i != ax)
    per_b = view.sum(axis=axes)
    return per_b[:4] + per_b[4:]


def pauli_word_matrix(word: PauliWord, particle: int) -> np.ndarray:
    """Dense 8x8 form of a single-walker word (for error templates)."""
    parts = [qb.particle for qb in word.support()]
    if any(p != particle for p in parts):
        raise ValueError("word must be supported on the requested walker")
    m = np.eye(1, dtype=complex) * word.phase
    letters = {qb.role: letter for qb, letter in word.ops}
    for role in ("c", "x", "y"):
        m = np.kron(m, _PAULI_1Q[letters.get(role, "I")])
    return m
