"""Logical-qubit lifecycle: preparation, encoding, cycles, frames, gates.

A Session owns one simulation run: the quantum state, the syndrome
history (reference eigenvalues plus per-cycle flip records), the Pauli
correction frame accumulated from decoding, and the logical axis frame.

The axis frame is the Heisenberg-side bookkeeping for logical gates.
Each axis is a real combination of Pauli words whose expectation yields
one Bloch component.  Applying a gate conjugates the axes by the walk
unitary actually executed and permutes them by the gate's ideal Bloch
action, so the reported Bloch vector follows the ideal 2x2 composition
exactly if and only if the walk implements the gate on the code algebra
(which the operator-identity suite verifies independently).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from . import engine, errors, pauli, programs
from .engine import COIN_H, COIN_X, COIN_Z, Layout, StateVector
from .pauli import (LOGICAL_X, LOGICAL_Y, LOGICAL_Z, PEX, PauliWord,
                    STABILIZERS, commutes, decode_lookup, pw_mul)

SIX = engine.SIX
FIVE = engine.FIVE

# The rotation axis realized by the T protocol: the CPhase pair encloses
# the coin phase, giving exp(-i pi/8 * Zc_pex x D) with D the transversal-
# Hadamard conjugate of the logical X.  D differs from (criteria g) Zbar
# by the detectable two-coin factor K = -(Yc)_P2 (Yc)_P0.
T_AXIS = PauliWord.from_letters(
    {pauli.q(4, "c"): "Z", pauli.q(4, "x"): "X", pauli.q(4, "y"): "X"})
T_THETA = np.pi / 8


@dataclass
class CycleRecord:
    raw: tuple          # measured eigenvalues (+1/-1) of s0..s5
    m_bits: tuple       # flips vs the previous cycle (or the reference)
    parity: int

    def m_str(self) -> str:
        return pauli.syndrome_str(self.m_bits)


@dataclass
class SyndromeHistory:
    references: tuple                 # eigenvalues recorded at preparation
    cycles: list = field(default_factory=list)

    def previous_raw(self) -> tuple:
        return self.cycles[-1].raw if self.cycles else self.references

    def next_parity(self) -> int:
        return len(self.cycles) % 2

    def append(self, raw: tuple, parity: Optional[int] = None) -> CycleRecord:
        prev = self.previous_raw()
        m = tuple(0 if a == b else 1 for a, b in zip(raw, prev))
        rec = CycleRecord(raw, m, self.next_parity() if parity is None else parity)
        self.cycles.append(rec)
        return rec

    def current_eigenvalue(self, index: int) -> int:
        return self.previous_raw()[index]


@dataclass
class PauliFrame:
    """Deferred correction: a Pauli word applied virtually at readout."""

    word: PauliWord = field(default_factory=PauliWord.identity)
    log: list = field(default_factory=list)
    uncorrectable: bool = False

    def absorb(self, m_bits: tuple) -> None:
        correction = decode_lookup(m_bits)
        if correction is None:
            self.uncorrectable = True
            self.log.append({"m": pauli.syndrome_str(m_bits), "correction": None})
            return
        self.word = pw_mul(self.word, correction)
        self.log.append({"m": pauli.syndrome_str(m_bits), "correction": correction.render()})

    def sign_for(self, word: PauliWord) -> int:
        return 1 if commutes(self.word, word) else -1


@dataclass(frozen=True)
class LogicalReadout:
    bloch: tuple

    @property
    def x(self):
        return self.bloch[0]

    @property
    def y(self):
        return self.bloch[1]

    @property
    def z(self):
        return self.bloch[2]


class AxisFrame:
    """Three Bloch axes as real combinations of Pauli words."""

    def __init__(self):
        self.axes = {
            "x": [(1.0, LOGICAL_X)],
            "y": [(1.0, LOGICAL_Y)],
            "z": [(1.0, LOGICAL_Z)],
        }

    @staticmethod
    def _conj_terms(terms, conj: Callable[[PauliWord], PauliWord]):
        # axis words are stored with phase +1; signs live in the coefficients
        out = []
        for coef, word in terms:
            image = conj(word)
            if image.phase_pow not in (0, 2):
                raise AssertionError("axis word lost Hermiticity under conjugation")
            sign = 1.0 if image.phase_pow == 0 else -1.0
            out.append((coef * sign, PauliWord(0, image.ops)))
        return out

    def conjugate_clifford(self, gate: str) -> None:
        """Axis update for a transversal coin Clifford (H, S or Z)."""
        conj = {
            "H": lambda w: pauli.conjugate_transversal(w, "H"),
            "S": lambda w: pauli.conjugate_transversal(w, "ZS"),
            "Z": lambda w: pw_mul(pw_mul(pauli.COIN_Z_REP, w), pauli.COIN_Z_REP),
        }[gate]
        x, y, z = self.axes["x"], self.axes["y"], self.axes["z"]
        cx, cy, cz = (self._conj_terms(t, conj) for t in (x, y, z))
        if gate == "H":        # (x, y, z) -> (z, -y, x)
            self.axes = {"x": cz, "y": self._scale(cy, -1.0), "z": cx}
        elif gate == "S":      # (x, y, z) -> (-y, x, z)
            self.axes = {"x": self._scale(cy, -1.0), "y": cx, "z": cz}
        elif gate == "Z":      # (x, y, z) -> (-x, -y, z)
            self.axes = {"x": self._scale(cx, -1.0), "y": self._scale(cy, -1.0), "z": cz}

    def conjugate_t_rotation(self, axis: PauliWord, theta: float) -> None:
        """Axis update for the walk unitary exp(-i theta * axis), whose
        ideal logical action is the Bloch rotation by 2*theta about z.

        Conjugation of an anticommuting Hermitian word P gives
        cos(2 theta) P - i sin(2 theta) (axis P); the product axis*P is
        anti-Hermitian, so -i(axis P) is again a +1-phase word.
        """
        def conj(terms):
            out = []
            for coef, word in terms:
                if commutes(word, axis):
                    out.append((coef, word))
                    continue
                prod = pw_mul(axis, word)
                if prod.phase_pow not in (1, 3):
                    raise AssertionError("rotation left the Hermitian ring")
                sigma = 1.0 if prod.phase_pow == 1 else -1.0
                out.append((coef * np.cos(2 * theta), word))
                out.append((coef * np.sin(2 * theta) * sigma, PauliWord(0, prod.ops)))
            return out

        c, s = np.cos(2 * theta), np.sin(2 * theta)
        x, y = self.axes["x"], self.axes["y"]
        new_x = self._combine(self._scale(x, c), self._scale(y, -s))
        new_y = self._combine(self._scale(x, s), self._scale(y, c))
        self.axes = {"x": conj(new_x), "y": conj(new_y), "z": conj(self.axes["z"])}
        self._tidy()

    @staticmethod
    def _scale(terms, factor):
        return [(coef * factor, word) for coef, word in terms]

    @staticmethod
    def _combine(*term_lists):
        out = []
        for terms in term_lists:
            out.extend(terms)
        return out

    def _tidy(self, tol: float = 1e-15) -> None:
        for name, terms in self.axes.items():
            acc: dict = {}
            for coef, word in terms:
                signed = coef * (1.0 if word.phase_pow == 0 else -1.0)
                key = word.ops
                acc[key] = acc.get(key, 0.0) + signed
            self.axes[name] = [(c, PauliWord(0, ops)) for ops, c in acc.items() if abs(c) > tol]

    def readout(self, state: StateVector, frame: PauliFrame) -> LogicalReadout:
        vals = []
        for name in ("x", "y", "z"):
            total = 0.0
            for coef, word in self.axes[name]:
                total += coef * frame.sign_for(word) * engine.expectation(state, word)
            vals.append(float(total))
        return LogicalReadout(tuple(vals))


class Session:
    """One codec run: state plus all classical records.

    ``displacement`` tracks the data walkers' net shift offset produced by
    the cycle dynamics (each cycle adds two, modulo four).  Readout and
    the protocols that assume home positions align first by applying two
    extra global shifts, the same move the gauge read uses.
    """

    def __init__(self, state: StateVector, history: SyndromeHistory,
                 rng: Optional[np.random.Generator] = None):
        self.state = state
        self.history = history
        self.frame = PauliFrame()
        self.axes = AxisFrame()
        self.rng = rng
        self.injected: list = []
        self.displacement = 0

    @property
    def layout(self) -> Layout:
        return self.state.layout

    def align(self) -> "Session":
        """Return the data walkers to their home positions if displaced."""
        while self.displacement % 4:
            self.state = engine.apply_shift(self.state)
            self.displacement = (self.displacement + 1) % 4
        return self

    def clone(self) -> "Session":
        s = Session(self.state.copy(),
                    SyndromeHistory(self.history.references, list(self.history.cycles)),
                    self.rng)
        s.frame = PauliFrame(self.frame.word, list(self.frame.log), self.frame.uncorrectable)
        s.axes = AxisFrame()
        s.axes.axes = {k: list(v) for k, v in self.axes.axes.items()}
        s.injected = list(self.injected)
        s.displacement = self.displacement
        return s


def prepare_logical_zero(layout: Layout = SIX, *,
                         rng: Optional[np.random.Generator] = None,
                         forced_signs: Optional[dict] = None) -> Session:
    """Project the all-origin walk state onto a stabilizer eigenspace and
    the +1 (or forced) logical-Z eigenspace; record the obtained signs.

    The resulting state is the run's |0>_L by definition.  Signs with
    zero probability (e.g. -1 for s0..s3 from this start) raise.
    """
    forced_signs = dict(forced_signs or {})
    state = engine.all_at_origin(layout)
    refs = []
    for i, s in enumerate(STABILIZERS):
        sign = forced_signs.get(f"s{i}")
        if sign is None:
            sign = _sample_sign(state, s, rng)
        state, _ = engine.project_pauli(state, s, sign)
        refs.append(sign)
    zbar_sign = forced_signs.get("zbar", 1)
    state, _ = engine.project_pauli(state, LOGICAL_Z, zbar_sign)
    return Session(state, SyndromeHistory(tuple(refs)), rng)


def _sample_sign(state: StateVector, word: PauliWord, rng) -> int:
    expect = engine.expectation(state, word)
    p_plus = (1 + expect) / 2
    if rng is None:
        return 1 if p_plus >= 0.5 else -1
    return 1 if rng.random() < p_plus else -1


def encode(session: Session, alpha: complex, beta: complex, *,
           forced_outcome: Optional[int] = None) -> Session:
    """Write (alpha, beta) from the external coin into the logical qubit.

    Three stages: the coin-to-logical CNOT walk, a Hadamard on the
    external coin, then measuring that coin and applying the transversal
    logical Z on outcome 1.  Either branch yields the same encoded state;
    the external walker is re-parked at coin 0, vertex 00 afterwards.
    """
    if not session.layout.with_external:
        raise ValueError("encoding requires the external walker")
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > 1e-10:
        raise ValueError("amplitudes must be normalized")
    session.align()
    u = np.array([[alpha, -np.conj(beta)], [beta, np.conj(alpha)]], dtype=complex)
    state = engine.apply_local_coin(session.state, PEX, u)
    state = programs.run_unitary(state, programs.build_cnot_coin_to_logical())
    state = engine.apply_local_coin(state, PEX, COIN_H)
    if forced_outcome is not None:
        bit, state, _ = engine.measure_coin(state, PEX, forced=forced_outcome)
    elif session.rng is not None:
        bit, state, _ = engine.measure_coin(state, PEX, rng=session.rng)
    else:
        bit, state, _ = engine.measure_coin(state, PEX, forced=0)
    if bit:
        state = engine.apply_local_coin(state, PEX, COIN_X)  # re-park
        state = engine.apply_coin(
            state, engine.CoinSpec.uniform(pauli.DATA_PARTICLES, COIN_Z))
    session.state = state
    return session


def inject_error(session: Session, spec) -> Session:
    session.state = errors.inject(session.state, spec)
    session.injected.append(errors.to_json(spec))
    return session


def drop_external(session: Session) -> Session:
    """Discard the external walker when it is parked at coin 0, vertex 00.

    The parked walker never fires the external interaction, so syndrome
    cycles are unaffected; dropping it shrinks the state by 8x.
    """
    layout = session.layout
    if not layout.with_external:
        return session
    session.align()
    small = Layout(layout.num_nested, False)
    idx = np.arange(small.dim, dtype=np.int64)
    amps = session.state.amps[idx]  # PEX occupies the top octant; b=0 block is 0..8^5-1
    vec = amps.copy()
    weight = float(np.real(np.vdot(vec, vec)))
    if abs(weight - 1.0) > 1e-9:
        raise ValueError(f"external walker is not parked (weight {weight:.6f} in its home block)")
    session.state = StateVector(small, vec / np.sqrt(weight))
    return session


def encoded_session(alpha: complex, beta: complex, *,
                    layout: Layout = FIVE,
                    rng: Optional[np.random.Generator] = None) -> Session:
    """Directly build an encoded Bloch state alpha|0>_L + beta|1>_L.

    Identical (exactly) to prepare + encode with the measurement outcome
    forced to 0, since the coin-to-logical walk equals a CNOT; the
    equivalence is pinned by tests.  Used by sweeps to avoid re-running
    the encoding walk thousands of times.
    """
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > 1e-10:
        raise ValueError("amplitudes must be normalized")
    base = _prepared_zero_cached(layout)
    zero = base.state.amps
    one = engine.apply_pauli_word(base.state, LOGICAL_X).amps
    ses = Session(StateVector(layout, alpha * zero + beta * one),
                  SyndromeHistory(base.history.references), rng)
    return ses


_PREP_CACHE: dict = {}


def _prepared_zero_cached(layout: Layout) -> Session:
    if layout not in _PREP_CACHE:
        _PREP_CACHE[layout] = prepare_logical_zero(layout)
    base = _PREP_CACHE[layout]
    return base.clone()


def run_cycle(session: Session, *, forced: Optional[dict] = None,
              all_branches: bool = False):
    """Execute one syndrome cycle and append its record to the history.

    The compile order follows the walkers' current displacement: from
    home, (s0,s2) runs first; displaced by two, (s1,s3) does.  Returns
    the session (seeded/forced policies) or, with ``all_branches``, the
    list of (probability, session) branches.
    """
    parity = 0 if session.displacement % 4 == 0 else 1
    prog = programs.build_full_cycle(parity)
    branches = programs.run_program(
        session.state, prog, rng=session.rng, forced=forced, all_branches=all_branches)
    results = []
    for br in branches:
        target = session if not all_branches else session.clone()
        target.state = br.state
        target.displacement = (target.displacement + 2) % 4
        raw = tuple(1 - 2 * br.outcomes[f"s{i}"] for i in range(6))
        target.history.append(raw, parity=parity)
        results.append((br.probability, target))
    if all_branches:
        return results
    return results[0][1]


def update_frame(session: Session) -> PauliFrame:
    """Fold the last cycle's flip pattern into the deferred correction."""
    if not session.history.cycles:
        raise ValueError("no cycle recorded yet")
    session.frame.absorb(session.history.cycles[-1].m_bits)
    return session.frame


def logical_readout(session: Session) -> LogicalReadout:
    """Frame-adjusted Bloch vector of the logical qubit."""
    session.align()
    return session.axes.readout(session.state, session.frame)


def apply_frame_physically(session: Session) -> Session:
    """Apply the accumulated correction as a real operation and clear it.

    The correction flips the stabilizer eigenvalues it anticommutes with,
    so the last recorded raw values are updated to keep subsequent
    relative flip records consistent.
    """
    session.align()  # corrections are home-frame words
    session.state = engine.apply_pauli_word(session.state, session.frame.word)
    nrm = session.state.norm()
    session.state.amps /= nrm
    flips = pauli.syndrome_of(session.frame.word)
    if session.history.cycles:
        last = session.history.cycles[-1]
        last.raw = tuple(r * (-1 if f else 1) for r, f in zip(last.raw, flips))
    else:
        session.history.references = tuple(
            r * (-1 if f else 1) for r, f in zip(session.history.references, flips))
    session.frame = PauliFrame()
    return session


def measure_g(session: Session, *, forced: Optional[dict] = None,
              all_branches: bool = False):
    """The End-Matter gauge read: ZZ walk, XX walk, product with s4.

    Returns (sign, session) or branch list [(prob, sign, session)].  The
    product is repeatable run to run, but it is a read of the two
    neighbor-pair products, not a projection onto g eigenspaces; see the
    module notes in programs.py and the test suite.
    """
    if not session.history.cycles:
        raise ValueError("measure_g needs a completed syndrome cycle for the s4 eigenvalue")
    session.align()
    e4 = session.history.current_eigenvalue(4)

    def stage(state, prog, tags):
        return programs.run_program(state, prog, rng=session.rng, forced=forced,
                                    all_branches=all_branches)

    results = []
    zz = programs.build_gauge_zz_measurement()
    xx = programs.build_gauge_xx_measurement()
    for b1 in stage(session.state, zz, ("gzz:p1", "gzz:p3")):
        v = (1 - 2 * b1.outcomes["gzz:p1"]) * (1 - 2 * b1.outcomes["gzz:p3"])
        for b2 in stage(b1.state, xx, ("gxx:p1", "gxx:p3")):
            w = (1 - 2 * b2.outcomes["gxx:p1"]) * (1 - 2 * b2.outcomes["gxx:p3"])
            target = session if not all_branches else session.clone()
            target.state = b2.state
            results.append((b1.probability * b2.probability, e4 * v * w, target))
    if all_branches:
        return results
    _, sign, target = results[0]
    return sign, target


def apply_logical_gate(session: Session, gate: str) -> Session:
    """Apply one logical gate (H, S, Z, or T) by its walk program.

    H, S and Z are single transversal coin steps; T is the coin-phase
    enclosed by the two CPhase walks, which equals
    exp(-i pi/8 Zc_pex x D) exactly and rotates the logical qubit about
    its z axis by pi/4.  Axes are conjugated accordingly.
    """
    if gate in ("H", "S", "Z"):
        session.align()
        prog = programs.build_logical_clifford(gate)
        session.state = programs.run_unitary(session.state, prog)
        session.axes.conjugate_clifford(gate)
        return session
    if gate == "T":
        return logical_T(session)
    raise ValueError(f"unknown logical gate {gate!r}")


def logical_T(session: Session) -> Session:
    """The pi/8 gate via the external walker.

    The coin phase exp(-i pi/8 Zc) on the parked external walker is
    enclosed by the two CPhase walks.  Because the CPhase squares to the
    identity and conjugates Zc_pex into Zc_pex x D, the three blocks
    compose to exp(-i pi/8 Zc_pex x D); with the external coin parked at
    |0> the data walkers see exactly exp(-i pi/8 D).
    """
    if not session.layout.with_external:
        raise ValueError("the T gate requires the external walker")
    session.align()
    cphase = programs.build_cphase()
    t_coin = np.diag(np.exp([-1j * T_THETA, 1j * T_THETA]))
    state = programs.run_unitary(session.state, cphase)
    state = engine.apply_local_coin(state, PEX, t_coin)
    state = programs.run_unitary(state, cphase)
    session.state = state
    session.axes.conjugate_t_rotation(T_AXIS, T_THETA)
    return session


def apply_word(session: Session, word: str) -> Session:
    """Apply a whitespace-separated gate word such as "H T T"."""
    for gate in word.split():
        apply_logical_gate(session, gate)
    return session


def ideal_bloch_map(word: str, bloch: tuple) -> tuple:
    """Exact 2x2 composition of a gate word acting on a Bloch vector."""
    mats = {
        "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
        "S": np.diag([1, 1j]).astype(complex),
        "T": np.diag([1, np.exp(1j * np.pi / 4)]).astype(complex),
        "Z": np.diag([1, -1]).astype(complex),
    }
    x, y, z = bloch
    rho = 0.5 * (np.eye(2) + x * np.array([[0, 1], [1, 0]])
                 + y * np.array([[0, -1j], [1j, 0]]) + z * np.diag([1, -1]))
    for gate in word.split():
        u = mats[gate]
        rho = u @ rho @ u.conj().T
    out = (np.trace(rho @ np.array([[0, 1], [1, 0]])).real,
           np.trace(rho @ np.array([[0, -1j], [1j, 0]])).real,
           np.trace(rho @ np.diag([1, -1])).real)
    return tuple(float(v) for v in out)


def transcript(session: Session) -> dict:
    """JSON-serializable record of the run."""
    return {
        "references": list(session.history.references),
        "cycles": [
            {"raw": list(c.raw), "m": c.m_str(), "parity": c.parity}
            for c in session.history.cycles
        ],
        "injected": session.injected,
        "frame": {
            "word": session.frame.word.render(),
            "uncorrectable": session.frame.uncorrectable,
            "log": session.frame.log,
        },
        "readout": list(logical_readout(session).bloch),
    }


def bloch_fidelity(a: Iterable[float], b: Iterable[float]) -> float:
    """Fidelity of the pure states with Bloch vectors a and b."""
    dot = sum(x * y for x, y in zip(a, b))
    return 0.5 * (1.0 + dot)
