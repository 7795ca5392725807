"""Gate identities for the parity gate, checked as equalities of measurement channels.

Two circuit fragments define the same channel when, for every input state,
their enumerated branches agree outcome-for-outcome (after relabelling),
with equal Born probabilities and equal post-measurement states up to a
global phase.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .circuits import CNOT, CU, RZ, BranchResult, Circuit, M, P, X, execute_all_branches
from .qstate import PureState, Qubit, QubitRegister, basis_state, fidelity_up_to_global_phase, random_state


@dataclass(frozen=True)
class ChannelDescription:
    """A circuit fragment viewed as a measurement channel.

    ``relabel`` maps this side's outcome names to the shared names used for
    comparison, with a flag saying whether the bit is complemented.
    ``ancillas`` are qubits prepared in ``|0>`` before the fragment and
    discarded after it; they must end in a computational basis state.
    """

    circuit: Circuit
    relabel: Mapping[str, tuple[str, bool]] = field(default_factory=dict)
    ancillas: tuple[str, ...] = ()

    def __post_init__(self):
        names = self.circuit.outcome_names
        unknown = set(self.relabel) - set(names)
        if unknown:
            raise ValueError(f"relabel refers to unknown outcomes {sorted(unknown)}")
        targets = [self.relabel.get(n, (n, False))[0] for n in names]
        if len(set(targets)) != len(targets):
            raise ValueError("outcome relabelling is not a bijection")

    @property
    def input_register(self) -> QubitRegister:
        return self.circuit.register.without(self.ancillas)

    def run(self, state: PureState) -> list[BranchResult]:
        full = _with_ancillas(state, self.circuit.register, self.ancillas)
        out = []
        for br in execute_all_branches(self.circuit, full):
            bits = {}
            for name, v in br.outcomes.items():
                target, flip = self.relabel.get(name, (name, False))
                bits[target] = v ^ int(flip)
            out.append(BranchResult(bits, br.probability, br.state.discard(self.ancillas)))
        return out


def _with_ancillas(state: PureState, register: QubitRegister, ancillas) -> PureState:
    if not ancillas:
        return state
    zero = basis_state(QubitRegister(tuple(register.qubit(a) for a in ancillas)), (0,) * len(ancillas))
    return state.kron(zero).permuted(register.labels)


@dataclass
class ChannelComparison:
    equal: bool
    max_deviation: float
    trials: int
    counterexample: str | None = None

    def __bool__(self):
        return self.equal


def _compare_on(a: ChannelDescription, b: ChannelDescription, state: PureState, tol: float):
    """Largest discrepancy between the two channels on one input, plus a message."""
    ba = {frozenset(br.outcomes.items()): br for br in a.run(state)}
    bb = {frozenset(br.outcomes.items()): br for br in b.run(state)}
    worst, msg = 0.0, None
    for key in ba.keys() | bb.keys():
        ra, rb = ba.get(key), bb.get(key)
        pa = ra.probability if ra else 0.0
        pb = rb.probability if rb else 0.0
        dev = abs(pa - pb)
        if ra and rb:
            dev = max(dev, 1 - fidelity_up_to_global_phase(ra.state, rb.state))
        if dev > worst:
            worst = dev
            if dev > tol:
                msg = f"outcomes {dict(sorted(key))}: p_a={pa:.6g}, p_b={pb:.6g}, deviation {dev:.3g}"
    return worst, msg


def channels_equal(
    a: ChannelDescription,
    b: ChannelDescription,
    trials: int = 50,
    seed: int = 0,
    tol: float = 1e-9,
    basis_inputs: bool = True,
) -> ChannelComparison:
    """Compare two channels on every basis input and ``trials`` random states."""
    reg = a.input_register
    if reg.labels != b.input_register.labels:
        raise ValueError(f"register mismatch: {reg.labels} vs {b.input_register.labels}")
    inputs = []
    if basis_inputs:
        inputs += [basis_state(reg, bits) for bits in itertools.product((0, 1), repeat=len(reg))]
    rng = np.random.default_rng(seed)
    inputs += [random_state(reg, rng) for _ in range(trials)]
    worst = 0.0
    for st in inputs:
        dev, msg = _compare_on(a, b, st, tol)
        worst = max(worst, dev)
        if msg is not None:
            return ChannelComparison(False, worst, len(inputs), msg)
    return ChannelComparison(True, worst, len(inputs))


def random_unitary(rng: np.random.Generator) -> np.ndarray:
    """2x2 unitary from the QR decomposition of a complex Gaussian matrix."""
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True)
class Identity:
    name: str
    lhs: ChannelDescription
    rhs: ChannelDescription


def builtin_identity_suite(phi: float = 0.7, u: np.ndarray | None = None, swap_lines: bool = False) -> list[Identity]:
    """The six parity-gate identities (a)-(f).

    With ``swap_lines`` the single-line gates of (a), (c), (d) and the CNOT
    order of (f) move to the second input of the P-gate.
    """
    if u is None:
        u = random_unitary(np.random.default_rng(2006))
    a, b = ("q1", "q2") if not swap_lines else ("q2", "q1")
    two = QubitRegister.of("q1", "q2")
    three = QubitRegister.of("q1", "q2", "q3")

    def ch(reg, *steps, **kw):
        return ChannelDescription(Circuit(reg, steps), **kw)

    suite = [
        Identity(
            "a: Z-rotation commutes",
            ch(two, RZ(a, phi), P("q1", "q2", "p")),
            ch(two, P("q1", "q2", "p"), RZ(a, phi)),
        ),
        Identity(
            "b: X(x)X commutes",
            ch(two, X("q1"), X("q2"), P("q1", "q2", "p")),
            ch(two, P("q1", "q2", "p"), X("q1"), X("q2")),
        ),
        Identity(
            "c: single X flips parity",
            ch(two, X(a), P("q1", "q2", "p")),
            ch(two, P("q1", "q2", "p'"), X(a), relabel={"p'": ("p", True)}),
        ),
        Identity(
            "d: controlled-U commutes on control line",
            ch(three, CU(a, "q3", u), P("q1", "q2", "p")),
            ch(three, P("q1", "q2", "p"), CU(a, "q3", u)),
        ),
        Identity(
            "e: P12 and P23 commute",
            ch(three, P("q1", "q2", "p12"), P("q2", "q3", "p23")),
            ch(three, P("q2", "q3", "p23"), P("q1", "q2", "p12")),
        ),
    ]
    anc_reg = QubitRegister(two.qubits + (Qubit("anc", ancilla=True),))
    suite.append(
        Identity(
            "f: ancilla network model",
            ch(two, P("q1", "q2", "p")),
            ch(anc_reg, CNOT(a, "anc"), CNOT(b, "anc"), M("anc", "p"), ancillas=("anc",)),
        )
    )
    return suite


def verify_suite(trials: int = 50, seed: int = 0, tol: float = 1e-9, swap_lines: bool = False):
    """Run :func:`channels_equal` on each built-in identity; yields (identity, comparison)."""
    for ident in builtin_identity_suite(swap_lines=swap_lines):
        yield ident, channels_equal(ident.lhs, ident.rhs, trials=trials, seed=seed, tol=tol)
