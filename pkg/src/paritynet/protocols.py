"""Entangling protocols built from parity measurements plus Pauli feed-forward.

Every protocol is a :class:`Protocol`: a raw circuit whose measurements
branch, a list of classically-controlled correction gates, and an initial
state. Running it yields one :class:`ProtocolBranch` per outcome record,
carrying both the raw post-measurement state and the corrected one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .circuits import H, M, P, X, Z, Circuit, Gate, execute_all_branches, execute_sample, run_steps, xor_of
from .qstate import (
    MAX_QUBITS,
    NORM_TOL,
    PureState,
    Qubit,
    QubitRegister,
    basis_state,
    default_register,
    factor_out,
    ghz_state,
    prefix_xor,
)


@dataclass(frozen=True)
class ProtocolBranch:
    outcomes: dict[str, int]
    probability: float
    state: PureState
    corrected: PureState


@dataclass(frozen=True)
class Protocol:
    name: str
    raw: Circuit
    corrections: tuple[Gate, ...]
    initial: PureState
    output: tuple[str, ...] | None = None

    @property
    def circuit(self) -> Circuit:
        """Raw circuit followed by the feed-forward corrections."""
        return self.raw.then(*self.corrections)

    def _finish(self, outcomes, probability, state) -> ProtocolBranch:
        (fixed,) = run_steps(self.corrections, state, outcomes)
        corrected = fixed.state
        if self.output is not None:
            corrected = factor_out(corrected, self.output)[0]
        return ProtocolBranch(dict(outcomes), probability, state, corrected)

    def branches(self) -> list[ProtocolBranch]:
        return [self._finish(b.outcomes, b.probability, b.state) for b in execute_all_branches(self.raw, self.initial)]

    def sample(self, seed: int) -> ProtocolBranch:
        b = execute_sample(self.raw, self.initial, seed)
        return self._finish(b.outcomes, b.probability, b.state)

    def branch(self, **outcomes: int) -> ProtocolBranch:
        for br in self.branches():
            if all(br.outcomes[k] == v for k, v in outcomes.items()):
                return br
        raise KeyError(f"no branch with outcomes {outcomes}")


def _require_normalized(state: PureState, what: str):
    if abs(state.norm - 1) > NORM_TOL:
        raise ValueError(f"{what} is not normalized (norm {state.norm:.12g})")


def _bit(v, name):
    if v not in (0, 1):
        raise ValueError(f"{name} must be 0 or 1, got {v!r}")
    return int(v)


# -- Bell states --------------------------------------------------------------

def bell_protocol(x: int, y: int, parity_bit: int = 0) -> Protocol:
    """``H (x) H`` then P on ``|xy>``; the correction ``1 (x) X^(p xor parity_bit)``.

    The corrected output is ``|B_{parity_bit, x xor y}>`` up to sign. The
    default ``parity_bit=0`` gives the Phi family; ``parity_bit=x`` makes
    ``(x, y) -> B`` a bijection onto all four Bell states.
    """
    x, y, parity_bit = _bit(x, "x"), _bit(y, "y"), _bit(parity_bit, "parity_bit")
    reg = default_register(2)
    raw = Circuit(reg, (H("q1"), H("q2"), P("q1", "q2", "p")))
    fix = (X("q2", "p ^ 1") if parity_bit else X("q2", "p"),)
    return Protocol("bell", raw, fix, basis_state(reg, (x, y)))


def prepare_bell(x: int, y: int, parity_bit: int = 0) -> list[ProtocolBranch]:
    return bell_protocol(x, y, parity_bit).branches()


def analyzer_protocol(state: PureState, variant: str = "four_hadamard") -> Protocol:
    if variant not in ("two_hadamard", "four_hadamard"):
        raise ValueError(f"unknown analyzer variant {variant!r}")
    if state.n != 2:
        raise ValueError("the Bell analyzer acts on two qubits")
    _require_normalized(state, "analyzer input")
    reg = default_register(2)
    steps = [P("q1", "q2", "i"), H("q1"), H("q2"), P("q1", "q2", "j")]
    if variant == "four_hadamard":
        steps += [H("q1"), H("q2")]
    return Protocol("analyzer", Circuit(reg, steps), (), state.relabel(reg))


def bell_analyzer(state: PureState, variant: str = "four_hadamard") -> list[ProtocolBranch]:
    """Nondestructive Bell measurement; ``i`` is the parity bit, ``j`` the sign bit."""
    return analyzer_protocol(state, variant).branches()


# -- teleportation ------------------------------------------------------------

TELEPORT_REGISTER = QubitRegister.of("A1", "A2", "B")


def teleport_protocol(psi: PureState) -> Protocol:
    if psi.n != 1:
        raise ValueError("teleportation input must be a single qubit")
    _require_normalized(psi, "teleportation input")
    reg = TELEPORT_REGISTER
    phi_plus = ghz_state(2, QubitRegister.of("A2", "B"))
    initial = psi.relabel(QubitRegister.of("A1")).kron(phi_plus)
    raw = Circuit(reg, (P("A1", "A2", "p1"), H("A1"), H("A2"), P("A1", "A2", "p2")))
    # Bob applies Z^p2 X^p1: X first
    fix = (X("B", "p1"), Z("B", "p2"))
    return Protocol("teleport", raw, fix, initial, output=("B",))


def teleport(psi: PureState) -> list[ProtocolBranch]:
    """All four teleportation branches; ``corrected`` is Bob's recovered qubit."""
    return teleport_protocol(psi).branches()


def split_teleport_branch(branch: ProtocolBranch) -> tuple[PureState, PureState]:
    """(Alice's pair, Bob's qubit) of an uncorrected branch; phase convention of :func:`factor_out`."""
    return factor_out(branch.state, ("A1", "A2"))


# -- GHZ ----------------------------------------------------------------------

def ghz_chain_protocol(n: int) -> Protocol:
    if not 2 <= n <= MAX_QUBITS:
        raise ValueError(f"GHZ chain needs 2 <= n <= {MAX_QUBITS}, got {n}")
    reg = default_register(n)
    labels = reg.labels
    steps = [H(q) for q in labels]
    steps += [P(labels[i - 1], labels[i], f"p{i + 1}") for i in range(1, n)]
    # j_i = p_2 ^ ... ^ p_i
    fix = tuple(X(labels[i], xor_of([f"p{k + 1}" for k in range(1, i + 1)])) for i in range(1, n))
    return Protocol("ghz", Circuit(reg, steps), fix, basis_state(reg, (0,) * n))


def ghz_chain(n: int) -> list[ProtocolBranch]:
    return ghz_chain_protocol(n).branches()


def parity_vector(outcomes: Mapping[str, int], n: int, prefix: str = "p") -> tuple[int, ...]:
    """``(0, p_2, ..., p_n)`` from outcome names ``p2 .. pn``."""
    return (0,) + tuple(outcomes[f"{prefix}{i}"] for i in range(2, n + 1))


def flip_vector(outcomes: Mapping[str, int], n: int, prefix: str = "p") -> tuple[int, ...]:
    """``j`` with ``j_1 = 0`` and ``j_i = j_{i-1} xor p_i``."""
    return prefix_xor(parity_vector(outcomes, n, prefix))


def ghz_fusion_protocol(n: int, m: int) -> Protocol:
    if n < 2 or m < 2 or n + m > MAX_QUBITS:
        raise ValueError(f"fusion needs n, m >= 2 and n + m <= {MAX_QUBITS}, got n={n}, m={m}")
    left = default_register(n, "a")
    right = default_register(m, "b")
    reg = left + right
    initial = ghz_state(n, left).kron(ghz_state(m, right))
    raw = Circuit(reg, (P(left.labels[-1], right.labels[0], "p"),))
    fix = tuple(X(q, "p") for q in right.labels)
    return Protocol("fuse", raw, fix, initial)


def ghz_fusion(n: int, m: int) -> list[ProtocolBranch]:
    """Fuse ``GHZ_n`` and ``GHZ_m`` with one P-gate; both branches correct to ``GHZ_{n+m}``."""
    return ghz_fusion_protocol(n, m).branches()


# -- CZ from two parity measurements and an ancilla ---------------------------

CZ_REGISTER = QubitRegister((Qubit("q1"), Qubit("anc", ancilla=True), Qubit("q2")))


def cz_via_parity_protocol(state: PureState) -> Protocol:
    if state.n != 2:
        raise ValueError("cz_via_parity acts on two qubits")
    _require_normalized(state, "CZ input")
    two = QubitRegister.of("q1", "q2")
    anc = basis_state(QubitRegister((CZ_REGISTER.qubit("anc"),)), (0,))
    initial = state.relabel(two).kron(anc).permuted(CZ_REGISTER.labels)
    raw = Circuit(
        CZ_REGISTER,
        (
            H("anc"),
            P("q1", "anc", "p1"),
            H("anc"),
            P("anc", "q2", "p2"),
            H("anc"),
            M("anc", "a"),
        ),
    )
    fix = (Z("q1", "p2"), Z("q2", "p1 ^ a"))
    return Protocol("cz", raw, fix, initial, output=("q1", "q2"))


def cz_via_parity(state: PureState) -> list[ProtocolBranch]:
    """Deterministic CZ on two qubits; ``corrected`` is the two-qubit output."""
    return cz_via_parity_protocol(state).branches()


def cz_matrix_oracle(state: PureState) -> PureState:
    """Dense ``diag(1, 1, 1, -1)`` applied to a two-qubit state."""
    return PureState(state.register, np.diag([1, 1, 1, -1]) @ state.amplitudes)


def single_qubit_state(alpha: complex, beta: complex, label: str = "q") -> PureState:
    amps = np.array([alpha, beta], dtype=complex)
    return PureState(QubitRegister.of(label), amps / np.linalg.norm(amps))


def ket_plus_phase(theta: float) -> PureState:
    """``(|0> + e^{i theta}|1>)/sqrt 2``."""
    return single_qubit_state(1 / math.sqrt(2), np.exp(1j * theta) / math.sqrt(2))


__all__ = [
    "Protocol",
    "ProtocolBranch",
    "analyzer_protocol",
    "bell_analyzer",
    "bell_protocol",
    "cz_matrix_oracle",
    "cz_via_parity",
    "cz_via_parity_protocol",
    "flip_vector",
    "ghz_chain",
    "ghz_chain_protocol",
    "ghz_fusion",
    "ghz_fusion_protocol",
    "ket_plus_phase",
    "parity_vector",
    "prepare_bell",
    "single_qubit_state",
    "split_teleport_branch",
    "teleport",
    "teleport_protocol",
]
