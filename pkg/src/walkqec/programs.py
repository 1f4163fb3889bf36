"""Walk-program compiler: each protocol becomes an explicit step sequence.

A program is a list of steps over {Coin, Shift, Neighbor, LocalCoin,
MeasureCoin, ResetAncilla, InjectionPoint}.  Coin/Shift/Neighbor steps are
globally synchronous across walkers.  Structure is used for guarantees:
transform blocks simply contain no Neighbor steps, which is how neighbor
interactions are suppressed there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from . import engine
from .engine import (COIN_H, COIN_HP, COIN_S, COIN_X, COIN_Z, CoinSpec,
                     Layout, StateVector, VERTEX_LABELS)
from .pauli import ANCILLA_PARTICLES, DATA_PARTICLES, P1, P3, PEX


@dataclass(frozen=True)
class Coin:
    spec: CoinSpec

    def describe(self) -> str:
        return f"coin {self.spec.describe()}"


@dataclass(frozen=True)
class Shift:
    def describe(self) -> str:
        return "shift"


@dataclass(frozen=True)
class Neighbor:
    def describe(self) -> str:
        return "neighbor"


@dataclass(frozen=True)
class LocalCoin:
    particle: int
    u: tuple  # 2x2 as nested tuples, kept hashable
    name: str = "U"

    @staticmethod
    def of(particle: int, u: np.ndarray, name: str = "U") -> "LocalCoin":
        return LocalCoin(particle, tuple(map(tuple, np.asarray(u, dtype=complex))), name)

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.u, dtype=complex)

    def describe(self) -> str:
        return f"local-coin P{self.particle} {self.name}"


@dataclass(frozen=True)
class MeasureCoin:
    particle: int
    tag: str

    def describe(self) -> str:
        return f"measure P{self.particle} -> {self.tag}"


@dataclass(frozen=True)
class ResetAncilla:
    particle: int

    def describe(self) -> str:
        return f"reset P{self.particle}"


@dataclass(frozen=True)
class InjectionPoint:
    tag: str

    def describe(self) -> str:
        return f"injection-point {self.tag}"


@dataclass(frozen=True)
class WalkProgram:
    name: str
    steps: tuple

    def __add__(self, other: "WalkProgram") -> "WalkProgram":
        return WalkProgram(f"{self.name}+{other.name}", self.steps + other.steps)

    def renamed(self, name: str) -> "WalkProgram":
        return WalkProgram(name, self.steps)

    def has_measurements(self) -> bool:
        return any(isinstance(s, MeasureCoin) for s in self.steps)

    def measurement_tags(self) -> list:
        return [s.tag for s in self.steps if isinstance(s, MeasureCoin)]

    def iteration_count(self) -> int:
        """Number of Coin/Shift(/Neighbor) walk iterations, counted by Shift steps."""
        return sum(1 for s in self.steps if isinstance(s, Shift))

    def listing(self) -> str:
        lines = [f"# program {self.name}"]
        for i, step in enumerate(self.steps):
            lines.append(f"{i:3d}  {step.describe()}")
        return "\n".join(lines)


@dataclass
class Branch:
    """One measurement branch of a program run."""

    state: StateVector
    probability: float = 1.0
    outcomes: dict = field(default_factory=dict)
    last_bit: dict = field(default_factory=dict)  # walker -> most recent outcome


def run_program(state: StateVector, program: WalkProgram, *,
                rng: Optional[np.random.Generator] = None,
                forced: Optional[dict] = None,
                all_branches: bool = False,
                injections: Optional[dict] = None,
                branch_tol: float = 1e-12) -> list:
    """Execute a program, returning the list of surviving branches.

    Measurement policy is one of: seeded (``rng``), ``forced`` (tag ->
    bit), or ``all_branches`` (branch summing; zero-probability branches
    are pruned).  ``injections`` maps an InjectionPoint tag to a callable
    state -> state, the only sanctioned way to disturb a managed run.
    """
    branches = [Branch(state.copy())]
    for step in program.steps:
        if isinstance(step, Coin):
            for br in branches:
                engine.apply_coin(br.state, step.spec, inplace=True)
        elif isinstance(step, Shift):
            for br in branches:
                engine.apply_shift(br.state, inplace=True)
        elif isinstance(step, Neighbor):
            for br in branches:
                engine.apply_neighbor(br.state, inplace=True)
        elif isinstance(step, LocalCoin):
            for br in branches:
                engine.apply_local_coin(br.state, step.particle, step.matrix, inplace=True)
        elif isinstance(step, MeasureCoin):
            new_branches = []
            for br in branches:
                if all_branches:
                    results = engine.measure_coin(br.state, step.particle,
                                                  both_branches=True, tol=branch_tol)
                elif forced is not None and step.tag in forced:
                    results = [engine.measure_coin(br.state, step.particle,
                                                   forced=forced[step.tag])]
                else:
                    if rng is None:
                        raise ValueError(
                            f"no measurement policy for tag {step.tag!r}: "
                            "pass rng, forced outcomes, or all_branches=True")
                    results = [engine.measure_coin(br.state, step.particle, rng=rng)]
                for bit, post, prob in results:
                    nb = Branch(post, br.probability * prob,
                                dict(br.outcomes), dict(br.last_bit))
                    nb.outcomes[step.tag] = bit
                    nb.last_bit[step.particle] = bit
                    new_branches.append(nb)
            branches = [b for b in new_branches if b.probability > branch_tol]
        elif isinstance(step, ResetAncilla):
            for br in branches:
                bit = br.last_bit.get(step.particle, 0)
                if bit:
                    engine.apply_local_coin(br.state, step.particle, COIN_X, inplace=True)
        elif isinstance(step, InjectionPoint):
            if injections and step.tag in injections:
                for br in branches:
                    br.state = injections[step.tag](br.state)
        else:
            raise TypeError(f"unknown step {step!r}")
    return branches


def run_unitary(state: StateVector, program: WalkProgram) -> StateVector:
    """Run a measurement-free program as a plain unitary map."""
    if program.has_measurements():
        raise ValueError(f"program {program.name!r} contains measurements")
    return run_program(state, program)[0].state


def inverted(program: WalkProgram) -> WalkProgram:
    """Reversed conjugate of a measurement-free program.

    Shifts invert as three forward shifts; Neighbor is its own inverse;
    coin entries are conjugate-transposed.
    """
    if program.has_measurements():
        raise ValueError("only measurement-free programs invert")
    steps: list = []
    for step in reversed(program.steps):
        if isinstance(step, Shift):
            steps.extend([Shift(), Shift(), Shift()])
        elif isinstance(step, Neighbor):
            steps.append(Neighbor())
        elif isinstance(step, Coin):
            spec = CoinSpec()
            for (p, v), u in step.spec.entries.items():
                spec.set(p, engine.LABEL_OF_V[v], np.asarray(u).conj().T)
            steps.append(Coin(spec))
        elif isinstance(step, LocalCoin):
            steps.append(LocalCoin.of(step.particle, step.matrix.conj().T, step.name + "+"))
        elif isinstance(step, InjectionPoint):
            steps.append(step)
        else:
            raise TypeError(f"cannot invert step {step!r}")
    return WalkProgram(f"{program.name}^-1", tuple(steps))


def _walk_iterations(spec: CoinSpec, count: int, with_neighbor: bool) -> list:
    steps = []
    for _ in range(count):
        if not spec.is_identity():
            steps.append(Coin(spec))
        steps.append(Shift())
        if with_neighbor:
            steps.append(Neighbor())
    return steps


def _ancilla_kick_spec(vertices: Sequence[str]) -> CoinSpec:
    spec = CoinSpec()
    for p in ANCILLA_PARTICLES:
        for label in vertices:
            spec.set(p, label, COIN_X)
    return spec


# Ancilla coin patterns for the three syndrome steps.  Which stabilizer a
# pattern picks up depends on the data walkers' shift offset at the time:
# the ZZI pattern reads correctly on unshifted data, the ZIZ pattern on
# data shifted by two, and the ZZZ pattern at any even offset.
_KICK_ZZ = ("10", "11")   # s0/s2 step
_KICK_ZY = ("11", "01")   # s1/s3 step
_KICK_XX = ("10", "01")   # s4/s5 step (after basis transform) and gauge reads

SYNDROME_PAIRS = {
    "s0s2": ("s0", "s2"),
    "s1s3": ("s1", "s3"),
    "s4s5": ("s4", "s5"),
}


def _hadamard_brackets(steps: list) -> list:
    pre = [LocalCoin.of(P1, COIN_H, "H"), LocalCoin.of(P3, COIN_H, "H")]
    return pre + steps + list(pre)


def _measure_and_reset(tag1: str, tag3: str) -> list:
    return [
        MeasureCoin(P1, tag1),
        MeasureCoin(P3, tag3),
        ResetAncilla(P1),
        ResetAncilla(P3),
    ]


@lru_cache(maxsize=None)
def build_syndrome_step(pair: str, start_shift: int = 0) -> WalkProgram:
    """One phase-kickback read: H brackets around six walk iterations.

    ``pair`` is "s0s2", "s1s3" or "s4s5".  P1 records the first generator
    of the pair and P3 the second.  The s4/s5 step wraps the six
    iterations in the coin-basis transform (with neighbor interactions
    structurally absent inside the transform); because those six
    iterations displace the data walkers by two, the closing transform is
    compiled in the shifted frame.  ``start_shift`` is the data walkers'
    displacement when the step begins, relevant only for s4/s5.
    """
    tag1, tag3 = SYNDROME_PAIRS[pair]
    if pair == "s0s2":
        kick = _KICK_ZZ
    elif pair == "s1s3":
        kick = _KICK_ZY
    elif pair == "s4s5":
        kick = _KICK_XX
    else:
        raise ValueError(f"unknown syndrome pair {pair!r}")
    middle = _hadamard_brackets(_walk_iterations(_ancilla_kick_spec(kick), 6, True))
    steps = middle + _measure_and_reset(tag1, tag3)
    if pair == "s4s5":
        opening = build_basis_transform(DATA_PARTICLES, frame=start_shift)
        closing = build_basis_transform(DATA_PARTICLES, frame=start_shift + 2)
        steps = list(opening.steps) + steps + list(closing.steps)
    return WalkProgram(f"syndrome[{pair}]", tuple(steps))


# Vertex-dependent coin patterns of the three special transform stages.
_TRANSFORM_STAGES = (
    {"00": COIN_H, "10": COIN_HP, "11": COIN_H, "01": COIN_HP},
    {"00": COIN_H, "10": COIN_HP, "11": COIN_HP, "01": COIN_H},
    {"00": COIN_H, "10": COIN_H, "11": COIN_HP, "01": COIN_HP},
)
# Iterations (1-indexed, coin before shift) that carry the three stages.
# Placing them at 3, 4, 5 does not reproduce the XXX<->ZZZ swap; an
# exhaustive schedule search shows 3, 4, 6 is the placement that makes the
# transform an exact intertwiner (and an involution).  When the walkers
# enter the transform shifted by two, the whole pattern fires two
# iterations later (5, 6, 8), which compiles Sigma^2 W Sigma^-2 exactly.
_TRANSFORM_SLOTS = {0: (3, 4, 6), 2: (5, 6, 8)}


def _transform_coin_spec(targets: Iterable[int], stage: int) -> CoinSpec:
    spec = CoinSpec()
    for p in targets:
        for label, u in _TRANSFORM_STAGES[stage].items():
            spec.set(p, label, u)
    return spec


def build_basis_transform(targets: Iterable[int], frame: int = 0) -> WalkProgram:
    """Eight coin+shift iterations swapping XXX and ZZZ eigenstates.

    No Neighbor steps appear; three iterations carry the vertex-dependent
    H / H' coins on each target walker, the rest are bare shifts.  The
    compiled transform W satisfies W XXX = ZZZ W, W ZZZ = XXX W and
    W^2 = 1 exactly on each target walker.  ``frame`` is the walkers'
    shift offset (0 or 2) at program start; the offset-2 compile is the
    same transform conjugated into the co-moving frame.
    """
    targets = tuple(targets)
    bad = set(targets) - set(DATA_PARTICLES)
    if bad:
        raise ValueError(f"transform targets must be data walkers, got {sorted(bad)}")
    slots = _TRANSFORM_SLOTS.get(frame % 4)
    if slots is None:
        raise ValueError(f"transform frame must be an even offset, got {frame}")
    steps: list = []
    for iteration in range(1, 9):
        if targets and iteration in slots:
            stage = slots.index(iteration)
            steps.append(Coin(_transform_coin_spec(targets, stage)))
        steps.append(Shift())
    suffix = "" if frame % 4 == 0 else "@+2"
    return WalkProgram(f"basis-transform{list(targets)}{suffix}", tuple(steps))


@lru_cache(maxsize=None)
def build_full_cycle(cycle_parity: int) -> WalkProgram:
    """One syndrome cycle: all six generators, order set by the parity.

    Even cycles run (s0,s2), (s1,s3), (s4,s5); odd cycles swap the first
    two because the previous cycle's s4/s5 step left the data walkers
    shifted by two.  No explicit re-shifting appears; the offsets are
    produced and consumed by the six-iteration blocks themselves.
    """
    even = cycle_parity % 2 == 0
    order = ["s0s2", "s1s3", "s4s5"] if even else ["s1s3", "s0s2", "s4s5"]
    steps: list = [InjectionPoint("cycle-start")]
    for pair in order:
        # Even cycles reach s4/s5 with the walkers home; odd cycles reach
        # it displaced by two (each six-iteration block adds two).
        start_shift = 0 if (even or pair != "s4s5") else 2
        steps.extend(build_syndrome_step(pair, start_shift=start_shift).steps)
    return WalkProgram(f"cycle[parity={cycle_parity % 2}]", tuple(steps))


@lru_cache(maxsize=None)
def build_cnot_coin_to_logical() -> WalkProgram:
    """Coin-controlled logical flip: transform, interact, transform.

    The middle eight iterations keep the data coins flipping every step
    (X on every vertex) while the external walker's coin-1 branch tours
    its square and tallies -1s against P4; bracketing with the P4 basis
    transform turns the accumulated controlled-ZZZ into controlled-XXX,
    i.e. a CNOT from the external coin onto the logical qubit.
    """
    transform = build_basis_transform((4,))
    data_x = CoinSpec.uniform(DATA_PARTICLES, COIN_X)
    middle = _walk_iterations(data_x, 8, True)
    steps = list(transform.steps) + middle + list(transform.steps)
    return WalkProgram("cnot[coin->logical]", tuple(steps))


@lru_cache(maxsize=None)
def build_cphase() -> WalkProgram:
    """The CNOT block enclosed in Hadamards on the external coin and the
    transversal data coins."""
    h_bracket = [LocalCoin.of(PEX, COIN_H, "H"),
                 Coin(CoinSpec.uniform(DATA_PARTICLES, COIN_H))]
    cnot = build_cnot_coin_to_logical()
    steps = h_bracket + list(cnot.steps) + h_bracket
    return WalkProgram("cphase[logical-ctrl]", tuple(steps))


@lru_cache(maxsize=None)
def build_gauge_zz_measurement() -> WalkProgram:
    """Read the Z-type gauge product via a pre/post shift and six iterations.

    P1 records (IZZ)_P0 (IZZ)_P2, P3 records (IZZ)_P2 (IZZ)_P4; the
    product of the two outcomes is the (gZ0 gZ1 s0 s1)-type eigenvalue
    read.  The closing Shift returns the data walkers to where they began.
    """
    steps: list = [Shift()]
    steps += _hadamard_brackets(_walk_iterations(_ancilla_kick_spec(_KICK_XX), 6, True))
    steps += _measure_and_reset("gzz:p1", "gzz:p3")
    steps.append(Shift())
    return WalkProgram("gauge-zz", tuple(steps))


@lru_cache(maxsize=None)
def build_gauge_xx_measurement() -> WalkProgram:
    """Same as the ZZ gauge read, enclosed by the three-walker transform."""
    transform = build_basis_transform(DATA_PARTICLES)
    zz = build_gauge_zz_measurement()
    steps = list(transform.steps) + [
        s if not isinstance(s, MeasureCoin) else MeasureCoin(s.particle, s.tag.replace("gzz", "gxx"))
        for s in zz.steps
    ] + list(transform.steps)
    return WalkProgram("gauge-xx", tuple(steps))


LOGICAL_COIN_OPS = {
    "H": COIN_H,
    "S": COIN_Z @ COIN_S,
    "Z": COIN_Z,
}


@lru_cache(maxsize=None)
def build_logical_clifford(gate: str) -> WalkProgram:
    """Single transversal coin step on the data walkers: H, Z*S, or Z."""
    u = LOGICAL_COIN_OPS.get(gate)
    if u is None:
        raise ValueError(f"unknown logical coin gate {gate!r}; pick from H, S, Z")
    spec = CoinSpec.uniform(DATA_PARTICLES, u)
    return WalkProgram(f"logical[{gate}]", (Coin(spec),))
