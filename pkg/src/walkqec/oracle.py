"""Brute-force ground truth: dense operators and program-unitary extraction.

Everything here trades speed for transparency.  Dense matrices are built
by Kronecker products in a documented qubit order and never exceed
dimension 4096; the strided engine is checked against them, not the other
way around.
"""

from __future__ import annotations

from typing import Mapping, Optional, Sequence

import numpy as np

from . import engine, pauli
from .engine import Layout, StateVector
from .pauli import (DATA_PARTICLES, GZ0, GZ1, LOGICAL_Z, PauliWord, STABILIZERS, q)
from .programs import WalkProgram, run_unitary

_P1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Dense qubit order for the 512-dim data space, most significant first.
# This makes the dense index coincide with the engine's packed data index
# d = b(P0) + 8 b(P2) + 64 b(P4).
DATA_QUBIT_ORDER = tuple(q(p, r) for p in (4, 2, 0) for r in ("c", "x", "y"))


def dense_of(word: PauliWord, qubit_order: Sequence = DATA_QUBIT_ORDER) -> np.ndarray:
    """Kronecker-product matrix of a signed Pauli word, exact phase."""
    order = tuple(qubit_order)
    unhoused = [qb for qb in word.support() if qb not in order]
    if unhoused:
        raise ValueError(f"word acts on qubits outside the ordering: {unhoused}")
    letters = dict(word.ops)
    m = np.array([[word.phase]], dtype=complex)
    for qb in order:
        m = np.kron(m, _P1Q[letters.get(qb, "I")])
    return m


def is_unitary_matrix(m: np.ndarray, atol: float = 1e-12) -> bool:
    return engine.is_unitary(m, atol)


def is_hermitian_matrix(m: np.ndarray, atol: float = 1e-12) -> bool:
    return bool(np.allclose(m, m.conj().T, atol=atol))


def codespace_projector(signs: Sequence[int]) -> np.ndarray:
    """Product of (1 + f_i s_i)/2 over the six stabilizers, 512x512."""
    if len(signs) != 6 or set(signs) - {1, -1}:
        raise ValueError("signs must be six values in {+1,-1}")
    proj = np.eye(512, dtype=complex)
    for f, s in zip(signs, STABILIZERS):
        proj = proj @ (np.eye(512) + f * dense_of(s)) / 2
    return proj


def codespace_basis(signs: Sequence[int]) -> dict:
    """Orthonormal basis of one stabilizer eigenspace, organized by
    (logical Z, gauge Z0, gauge Z1) eigenvalues.

    The simultaneous eigenspace always has dimension 8; each of the eight
    (z, a, b) sign patterns contributes exactly one basis vector.
    """
    proj = codespace_projector(signs)
    rank = int(round(np.trace(proj).real))
    if rank != 8:
        raise ValueError(f"stabilizer eigenspace has dimension {rank}, expected 8")
    labels = [dense_of(LOGICAL_Z), dense_of(GZ0), dense_of(GZ1)]
    out = {}
    for z in (1, -1):
        for a in (1, -1):
            for b in (1, -1):
                sub = proj.copy()
                for f, mat in zip((z, a, b), labels):
                    sub = sub @ (np.eye(512) + f * mat) / 2
                # rank-1: take the dominant column and normalize
                u, s, _ = np.linalg.svd(sub)
                if abs(s[0] - 1.0) > 1e-9 or (len(s) > 1 and s[1] > 1e-9):
                    raise ValueError(f"sector ({z},{a},{b}) is not one-dimensional")
                out[(z, a, b)] = u[:, 0]
    return out


def data_indices(layout: Layout, rest: Optional[Mapping[int, int]] = None) -> np.ndarray:
    """Flat indices with non-data walkers pinned to given basis values.

    ``rest`` maps walker -> packed b value (default 0: coin 0 at vertex
    00).  The result is ordered by the packed data index d."""
    rest = dict(rest or {})
    others = [p for p in layout.particles if p not in DATA_PARTICLES]
    base = 0
    for p in others:
        base |= (rest.get(p, 0) & 7) << (3 * layout.slot(p))
    d = np.arange(512, dtype=np.int64)
    b0, b2, b4 = d & 7, (d >> 3) & 7, (d >> 6) & 7
    return (base
            | (b0 << (3 * layout.slot(0)))
            | (b2 << (3 * layout.slot(2)))
            | (b4 << (3 * layout.slot(4))))


def embed_data_vector(layout: Layout, vec: np.ndarray,
                      rest: Optional[Mapping[int, int]] = None) -> StateVector:
    """Lift a 512-dim data-space vector into a full layout state, with the
    remaining walkers in fixed basis states (default coin 0, vertex 00)."""
    if vec.shape != (512,):
        raise ValueError("data vector must have dimension 512")
    amps = np.zeros(layout.dim, dtype=complex)
    amps[data_indices(layout, rest)] = vec
    return StateVector(layout, amps)


def extract_data_vector(state: StateVector,
                        rest: Optional[Mapping[int, int]] = None,
                        require: float = 1 - 1e-9) -> np.ndarray:
    """Project a full state onto fixed non-data walker values and return
    the 512-dim data vector.  Raises if too much weight lies elsewhere."""
    vec = state.amps[data_indices(state.layout, rest)]
    weight = float(np.vdot(vec, vec).real)
    if weight < require:
        raise ValueError(f"only {weight:.6f} of the state has the walkers at the pinned values")
    return vec


def extract_unitary(program: WalkProgram, inputs: Sequence[StateVector],
                    outputs: Sequence[StateVector]) -> np.ndarray:
    """Matrix <out_i | U_program | in_j> for a measurement-free program."""
    if program.has_measurements():
        raise ValueError(f"extract_unitary needs a measurement-free program, got {program.name!r}")
    cols = []
    for s in inputs:
        final = run_unitary(s, program)
        cols.append([complex(np.vdot(o.amps, final.amps)) for o in outputs])
    return np.array(cols, dtype=complex).T


def program_matrix_on_particle(program: WalkProgram, layout: Layout, particle: int,
                               rest: Optional[Mapping[int, int]] = None) -> np.ndarray:
    """8x8 matrix of a program restricted to one walker, all others pinned.

    Only meaningful when the program acts trivially on the pinned walkers
    (checked by unitarity of the result)."""
    rest = dict(rest or {})
    ins = []
    for b in range(8):
        amps = np.zeros(layout.dim, dtype=complex)
        flat = (b & 7) << (3 * layout.slot(particle))
        for p in layout.particles:
            if p != particle:
                flat |= (rest.get(p, 0) & 7) << (3 * layout.slot(p))
        amps[flat] = 1.0
        ins.append(StateVector(layout, amps))
    return extract_unitary(program, ins, ins)


def operator_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Max-norm distance, insensitive to a global phase on ``a``."""
    a = np.asarray(a)
    b = np.asarray(b)
    tr = np.trace(b.conj().T @ a)
    phase = tr / abs(tr) if abs(tr) > 1e-12 else 1.0
    return float(np.max(np.abs(a / phase - b)))
