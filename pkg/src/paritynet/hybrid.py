"""Hybrid networks: electrons carrying a spin qubit and a mode (charge) qubit.

Only mode qubits are ever parity-measured; spins are touched solely by
mode-controlled gates (beam-splitter plus spin flip) and feed-forward Paulis.
Spin ``|up>`` is ``|0>`` and ``|down>`` is ``|1>``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .circuits import (
    CNOT,
    CZ,
    H,
    M,
    P,
    X,
    Z,
    BranchResult,
    Circuit,
    ParityMeasurement,
    apply_gate,
    execute_all_branches,
    run_steps,
    xor_of,
)
from .protocols import Protocol, ProtocolBranch, flip_vector
from .qstate import (
    MODE,
    SPIN,
    PureState,
    Qubit,
    QubitRegister,
    basis_state,
    bell_state,
    binary_parity,
    apply_pauli_string,
    factor_out,
    fidelity_up_to_global_phase,
    ghz_state,
    pauli_x,
    pauli_z,
)

MAX_ELECTRONS = 10


def spin(i: int) -> str:
    return f"s{i}"


def mode(i: int) -> str:
    return f"k{i}"


@dataclass(frozen=True)
class ElectronArray:
    """``n`` electrons laid out as ``s1 k1 s2 k2 ...`` (electrons numbered from 1)."""

    n: int

    @property
    def register(self) -> QubitRegister:
        qs = []
        for i in range(1, self.n + 1):
            qs += [Qubit(spin(i), SPIN, i), Qubit(mode(i), MODE, i)]
        return QubitRegister(tuple(qs))

    @property
    def spins(self) -> tuple[str, ...]:
        return tuple(spin(i) for i in range(1, self.n + 1))

    @property
    def modes(self) -> tuple[str, ...]:
        return tuple(mode(i) for i in range(1, self.n + 1))


def charge_parity_only(circuit: Circuit) -> bool:
    """True when every parity measurement acts on two mode qubits."""
    reg = circuit.register
    return all(
        reg.qubit(s.q1).role == MODE and reg.qubit(s.q2).role == MODE
        for s in circuit.steps
        if isinstance(s, ParityMeasurement)
    )


# -- single-electron spin-mode entanglement -----------------------------------

def epr_steps(i: int):
    """Beam-splitter on the mode, then a spin flip on mode 1 only."""
    return (H(mode(i)), CNOT(mode(i), spin(i)))


def prepare_spin_mode_epr(state: PureState, i: int, check: bool = True) -> PureState:
    """Turn electron ``i`` from ``|up 0>`` into ``(|up 0> + |down 1>)/sqrt 2``."""
    if check:
        for q in (spin(i), mode(i)):
            if state.probability_of(q, 0) < 1 - 1e-10:
                raise ValueError(f"electron {i} is not in |up 0>")
    for g in epr_steps(i):
        state = apply_gate(state, g)
    return state


def epr_product(n: int) -> PureState:
    """``(|up 0> + |down 1>)^{(x) n}`` on an :class:`ElectronArray`."""
    arr = ElectronArray(n)
    st = basis_state(arr.register, (0,) * (2 * n))
    for i in range(1, n + 1):
        st = prepare_spin_mode_epr(st, i)
    return st


# -- n-electron GHZ -----------------------------------------------------------

def _pi_m_condition(n: int, prefix: str) -> str | None:
    # pi(m) = xor_i m_i, m_i = xor_{l<=i} p'_l  =>  p'_l counted (n - l + 1) times
    return xor_of([f"{prefix}{l}" for l in range(2, n + 1) if (n - l + 1) % 2])


def hybrid_ghz_protocol(n: int) -> Protocol:
    if not 2 <= n <= MAX_ELECTRONS:
        raise ValueError(f"hybrid GHZ needs 2 <= n <= {MAX_ELECTRONS}, got {n}")
    arr = ElectronArray(n)
    k, s = arr.modes, arr.spins
    steps = [P(k[i - 1], k[i], f"p{i + 1}") for i in range(1, n)]
    steps += [H(q) for q in k]
    if n % 2:
        steps.append(CZ(s[0], k[0]))
    steps += [P(k[i - 1], k[i], f"pp{i + 1}") for i in range(1, n)]

    def j_cond(i):
        return xor_of([f"p{l}" for l in range(2, i + 2)])

    def m_cond(i):
        return xor_of([f"pp{l}" for l in range(2, i + 2)])

    # undo X(j)_s Z_{1,s}^{pi(m)} Z(j)_k X(m)_k, rightmost factor last
    fix = [X(s[i], j_cond(i)) for i in range(1, n)]
    pim = _pi_m_condition(n, "pp")
    if pim:
        fix.append(Z(s[0], pim))
    fix += [Z(k[i], j_cond(i)) for i in range(1, n)]
    fix += [X(k[i], m_cond(i)) for i in range(1, n)]
    return Protocol("hybrid-ghz", Circuit(arr.register, steps), tuple(fix), epr_product(n))


def hybrid_ghz(n: int) -> list[ProtocolBranch]:
    """Spin GHZ_n times mode GHZ_n from single-electron EPR pairs, all branches."""
    return hybrid_ghz_protocol(n).branches()


def hybrid_swap_two() -> list[ProtocolBranch]:
    return hybrid_ghz(2)


def target_ghz_pair(n: int) -> PureState:
    """``|GHZ_n>_spin |GHZ_n>_mode`` on the interleaved electron register."""
    arr = ElectronArray(n)
    sp = ghz_state(n, QubitRegister(tuple(arr.register.qubit(q) for q in arr.spins)))
    md = ghz_state(n, QubitRegister(tuple(arr.register.qubit(q) for q in arr.modes)))
    return sp.kron(md).permuted(arr.register.labels)


def _on(state: PureState, labels: Sequence[str], bits: Sequence[int], kind: str) -> PureState:
    full = [0] * state.n
    for lab, b in zip(labels, bits):
        full[state.register.index(lab)] = b
    return apply_pauli_string(state, pauli_x(full) if kind == "X" else pauli_z(full))


def psi1_expected(n: int, outcomes: Mapping[str, int]) -> PureState:
    """``X(j)_s X(j)_k |GHZ_2n>`` for the first-chain outcomes."""
    arr = ElectronArray(n)
    j = flip_vector(outcomes, n, "p")
    st = ghz_state(2 * n, arr.register)
    st = _on(st, arr.spins, j, "X")
    return _on(st, arr.modes, j, "X")


def psi3_expected(n: int, outcomes: Mapping[str, int]) -> PureState:
    """``X(j)_s Z_{1,s}^{pi(m)} Z(j)_k X(m)_k |GHZ_n>_s |GHZ_n>_k``."""
    arr = ElectronArray(n)
    j = flip_vector(outcomes, n, "p")
    m = flip_vector(outcomes, n, "pp")
    st = target_ghz_pair(n)
    st = _on(st, arr.modes, m, "X")
    st = _on(st, arr.modes, j, "Z")
    st = _on(st, arr.spins[:1], (binary_parity(m),), "Z")
    return _on(st, arr.spins, j, "X")


def first_chain_states(n: int) -> list[BranchResult]:
    """Branches after only the first mode parity chain (the psi_1 checkpoint)."""
    proto = hybrid_ghz_protocol(n)
    first = Circuit(proto.raw.register, proto.raw.steps[: n - 1])
    return execute_all_branches(first, proto.initial)


# -- spin CZ using the modes as ancillas --------------------------------------

NEW_CZ_REGISTER = QubitRegister(
    (Qubit("s1", SPIN, 1), Qubit("k1", MODE, 1), Qubit("k2", MODE, 2), Qubit("s2", SPIN, 2))
)


def new_cz_circuit() -> Circuit:
    raw = new_cz_protocol(basis_state(QubitRegister.of("a", "b"), (0, 0)))
    return raw.circuit


def new_cz_protocol(spins: PureState) -> Protocol:
    if spins.n != 2:
        raise ValueError("new_cz acts on two spins")
    if abs(spins.norm - 1) > 1e-10:
        raise ValueError("spin input is not normalized")
    s1, s2 = (NEW_CZ_REGISTER.qubit(q) for q in ("s1", "s2"))
    modes = basis_state(QubitRegister((NEW_CZ_REGISTER.qubit("k1"), NEW_CZ_REGISTER.qubit("k2"))), (0, 0))
    initial = spins.relabel(QubitRegister((s1, s2))).kron(modes).permuted(NEW_CZ_REGISTER.labels)
    return _new_cz(initial)


def _new_cz(initial: PureState) -> Protocol:
    for q in ("k1", "k2"):
        if initial.probability_of(q, 0) < 1 - 1e-10:
            raise ValueError("mode qubits must start in |00>")
    raw = Circuit(
        NEW_CZ_REGISTER,
        (
            H("k2"),
            CNOT("s1", "k1"),
            P("k1", "k2", "p1"),
            H("k2"),
            CNOT("s2", "k2"),
            P("k1", "k2", "p2"),
            H("k1"),
            H("k2"),
            P("k1", "k2", "p3"),
        ),
    )
    fix = (Z("s1", "1 ^ p1 ^ p2 ^ p3"), Z("s2", "p1"))
    return Protocol("new-cz", raw, fix, initial, output=("s1", "s2"))


def new_cz(spins: PureState) -> list[ProtocolBranch]:
    """Spin CZ with the mode qubits as ancillas; ``corrected`` holds the two spins."""
    return new_cz_protocol(spins).branches()


def new_cz_full(state: PureState) -> list[ProtocolBranch]:
    """Like :func:`new_cz` on a full ``s1 k1 k2 s2`` state; ``corrected`` keeps the modes."""
    proto = _new_cz(state)
    return [
        ProtocolBranch(b.outcomes, b.probability, b.state, run_steps(proto.corrections, b.state, b.outcomes)[0].state)
        for b in execute_all_branches(proto.raw, state)
    ]


def mode_bell(p3: int, p2: int) -> PureState:
    return bell_state(p3, p2, QubitRegister((NEW_CZ_REGISTER.qubit("k1"), NEW_CZ_REGISTER.qubit("k2"))))


def reset_modes_after_cz(state: PureState, p3: int) -> list[BranchResult]:
    """Measure ``k1`` -> r, then ``X^r`` on k1 and ``X^(p3 xor r)`` on k2; modes end in ``|00>``."""
    modes, _ = factor_out(state, ("k1", "k2"))
    if max(fidelity_up_to_global_phase(modes, mode_bell(p3, j)) for j in (0, 1)) < 1 - 1e-9:
        raise ValueError(f"modes are not in a Bell state with parity bit {p3}")
    steps = (M("k1", "r"), X("k1", "r"), X("k2", "r ^ p3"))
    return run_steps(steps, state, {"p3": p3})


def spin_cz_twice(spins: PureState) -> list[tuple[dict, float, PureState]]:
    """Apply new_cz, reset the modes, apply new_cz again; (outcomes, prob, spins) per branch."""
    out = []
    proto = new_cz_protocol(spins)
    for b1 in execute_all_branches(proto.raw, proto.initial):
        (c1,) = run_steps(proto.corrections, b1.state, b1.outcomes)
        for r1 in reset_modes_after_cz(c1.state, b1.outcomes["p3"]):
            for b2 in execute_all_branches(proto.raw, r1.state.permuted(NEW_CZ_REGISTER.labels)):
                (c2,) = run_steps(proto.corrections, b2.state, b2.outcomes)
                bits = {**{f"{k}_1": v for k, v in b1.outcomes.items()}, "r": r1.outcomes["r"]}
                bits.update({f"{k}_2": v for k, v in b2.outcomes.items()})
                out.append((bits, b1.probability * r1.probability * b2.probability, factor_out(c2.state, ("s1", "s2"))[0]))
    return out


__all__ = [
    "ElectronArray",
    "charge_parity_only",
    "epr_product",
    "first_chain_states",
    "hybrid_ghz",
    "hybrid_ghz_protocol",
    "hybrid_swap_two",
    "mode_bell",
    "new_cz",
    "new_cz_circuit",
    "new_cz_full",
    "new_cz_protocol",
    "prepare_spin_mode_epr",
    "psi1_expected",
    "psi3_expected",
    "reset_modes_after_cz",
    "spin_cz_twice",
    "target_ghz_pair",
]
