"""Circuit IR with parity measurements and classical feed-forward.

A circuit is an immutable sequence of steps over a labelled register:

* :class:`Gate` -- a unitary, optionally conditioned on a classical
  expression over earlier outcome bits (``"p1 ^ p2"``, ``"1 ^ a"``,
  ``"p2 & p3"``);
* :class:`ParityMeasurement` -- the P-gate, a nondestructive projection onto
  the even (``p = 0``) or odd (``p = 1``) subspace of ``x xor y``;
* :class:`ZMeasurement` -- a destructive single-qubit readout, used only for
  ancilla readout; the qubit is left in ``|outcome>``.

Circuits run either by exhaustive branch enumeration or by seeded sampling.
"""
from __future__ import annotations

import ast
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence, Union

import numpy as np

from .qstate import PureState, QubitRegister

PRUNE_TOL = 1e-12

_SQ2 = 1 / math.sqrt(2)
_FIXED_1Q = {
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
ONE_QUBIT = ("H", "X", "Z", "RZ")
TWO_QUBIT = ("CNOT", "CZ", "CU")


# -- classical conditions -----------------------------------------------------

@lru_cache(maxsize=None)
def _parse_condition(expr: str) -> ast.expr:
    try:
        tree = ast.parse(expr, mode="eval").body
    except SyntaxError as exc:
        raise ValueError(f"bad condition {expr!r}: {exc.msg}") from None
    _validate(tree, expr)
    return tree


def _validate(node: ast.expr, expr: str):
    if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.BitXor, ast.BitAnd)):
        _validate(node.left, expr)
        _validate(node.right, expr)
    elif isinstance(node, ast.Name):
        pass
    elif isinstance(node, ast.Constant) and node.value in (0, 1) and not isinstance(node.value, bool):
        pass
    else:
        raise ValueError(f"condition {expr!r} may only use outcome names, 0, 1, '^' and '&'")


def condition_names(expr: str) -> set[str]:
    return {n.id for n in ast.walk(_parse_condition(expr)) if isinstance(n, ast.Name)}


def evaluate_condition(expr: str, bits: Mapping[str, int]) -> int:
    def ev(node):
        if isinstance(node, ast.Name):
            if node.id not in bits:
                raise KeyError(f"classical bit {node.id!r} is unassigned")
            return int(bits[node.id]) & 1
        if isinstance(node, ast.Constant):
            return node.value
        left, right = ev(node.left), ev(node.right)
        return left ^ right if isinstance(node.op, ast.BitXor) else left & right

    return ev(_parse_condition(expr))


def xor_of(names: Sequence[str]) -> str | None:
    """Condition string for the XOR of ``names``; None when empty."""
    return " ^ ".join(names) if names else None


# -- steps --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Gate:
    kind: str
    qubits: tuple[str, ...]
    condition: str | None = None
    phi: float | None = None
    matrix: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if self.kind in ONE_QUBIT:
            arity = 1
        elif self.kind in TWO_QUBIT:
            arity = 2
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.qubits) != arity:
            raise ValueError(f"{self.kind} acts on {arity} qubit(s), got {self.qubits}")
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"{self.kind} needs two distinct qubits")
        if self.kind == "RZ" and self.phi is None:
            raise ValueError("RZ needs an angle phi")
        if self.kind == "CU":
            if self.matrix is None:
                raise ValueError("CU needs a 2x2 matrix")
            u = np.array(self.matrix, dtype=complex)
            if u.shape != (2, 2) or not np.allclose(u.conj().T @ u, np.eye(2), atol=1e-10):
                raise ValueError("CU matrix must be a 2x2 unitary")
            u.setflags(write=False)
            object.__setattr__(self, "matrix", u)
        if self.condition is not None:
            _parse_condition(self.condition)

    def unitary_1q(self) -> np.ndarray:
        if self.kind == "RZ":
            # exp(i phi Z)
            return np.diag([np.exp(1j * self.phi), np.exp(-1j * self.phi)])
        return _FIXED_1Q[self.kind]

    def __eq__(self, other):
        if not isinstance(other, Gate):
            return NotImplemented
        same_matrix = (self.matrix is None and other.matrix is None) or (
            self.matrix is not None and other.matrix is not None and np.array_equal(self.matrix, other.matrix)
        )
        return (self.kind, self.qubits, self.condition, self.phi) == (
            other.kind, other.qubits, other.condition, other.phi
        ) and same_matrix


@dataclass(frozen=True)
class ParityMeasurement:
    q1: str
    q2: str
    out: str

    def __post_init__(self):
        if self.q1 == self.q2:
            raise ValueError(f"parity measurement needs two distinct qubits, got {self.q1!r} twice")


@dataclass(frozen=True)
class ZMeasurement:
    q: str
    out: str


Step = Union[Gate, ParityMeasurement, ZMeasurement]


def H(q, cond=None):
    return Gate("H", (q,), cond)


def X(q, cond=None):
    return Gate("X", (q,), cond)


def Z(q, cond=None):
    return Gate("Z", (q,), cond)


def RZ(q, phi, cond=None):
    """``exp(i phi Z)`` on ``q``."""
    return Gate("RZ", (q,), cond, phi=float(phi))


def CNOT(control, target, cond=None):
    return Gate("CNOT", (control, target), cond)


def CZ(a, b, cond=None):
    return Gate("CZ", (a, b), cond)


def CU(control, target, u, cond=None):
    return Gate("CU", (control, target), cond, matrix=np.asarray(u, dtype=complex))


def P(q1, q2, out):
    return ParityMeasurement(q1, q2, out)


def M(q, out):
    return ZMeasurement(q, out)


@dataclass(frozen=True)
class Circuit:
    register: QubitRegister
    steps: tuple[Step, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        bound: set[str] = set()
        for step in self.steps:
            for q in _step_qubits(step):
                if q not in self.register:
                    raise ValueError(f"step {step} uses unknown qubit {q!r}")
            if isinstance(step, Gate):
                if step.condition is not None:
                    missing = condition_names(step.condition) - bound
                    if missing:
                        raise ValueError(
                            f"condition {step.condition!r} references unbound outcomes {sorted(missing)}"
                        )
            else:
                if step.out in bound:
                    raise ValueError(f"outcome name {step.out!r} bound twice")
                bound.add(step.out)

    @property
    def outcome_names(self) -> tuple[str, ...]:
        return tuple(s.out for s in self.steps if not isinstance(s, Gate))

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.register != self.register:
            raise ValueError("cannot concatenate circuits on different registers")
        return Circuit(self.register, self.steps + other.steps)

    def then(self, *steps: Step) -> "Circuit":
        return Circuit(self.register, self.steps + tuple(steps))

    # JSON ------------------------------------------------------------------
    def to_json(self) -> dict:
        return {"register": self.register.to_json(), "steps": [_step_to_json(s) for s in self.steps]}

    @classmethod
    def from_json(cls, data: dict | str) -> "Circuit":
        if isinstance(data, str):
            data = json.loads(data)
        reg = QubitRegister.from_json(data["register"])
        return cls(reg, tuple(_step_from_json(d) for d in data["steps"]))


def _step_qubits(step: Step) -> tuple[str, ...]:
    if isinstance(step, Gate):
        return step.qubits
    if isinstance(step, ParityMeasurement):
        return (step.q1, step.q2)
    return (step.q,)


def _step_to_json(step: Step) -> dict:
    if isinstance(step, ParityMeasurement):
        return {"op": "P", "q1": step.q1, "q2": step.q2, "out": step.out}
    if isinstance(step, ZMeasurement):
        return {"op": "M", "q": step.q, "out": step.out}
    if len(step.qubits) == 1:
        d = {"op": step.kind, "q": step.qubits[0]}
    else:
        d = {"op": step.kind, "q1": step.qubits[0], "q2": step.qubits[1]}
    if step.phi is not None:
        d["phi"] = step.phi
    if step.matrix is not None:
        d["U"] = [[[z.real, z.imag] for z in row] for row in step.matrix]
    if step.condition is not None:
        d["if"] = step.condition
    return d


def _step_from_json(d: dict) -> Step:
    op = d.get("op")
    if op == "P":
        return ParityMeasurement(d["q1"], d["q2"], d["out"])
    if op == "M":
        return ZMeasurement(d["q"], d["out"])
    cond = d.get("if")
    if op in ONE_QUBIT:
        return Gate(op, (d["q"],), cond, phi=d.get("phi"))
    if op in TWO_QUBIT:
        u = None
        if "U" in d:
            u = np.array([[complex(re, im) for re, im in row] for row in d["U"]])
        return Gate(op, (d["q1"], d["q2"]), cond, matrix=u)
    raise ValueError(f"unknown step op {op!r}")


# -- execution ----------------------------------------------------------------

@dataclass(frozen=True)
class BranchResult:
    outcomes: dict[str, int]
    probability: float
    state: PureState


def _apply_1q(t: np.ndarray, u: np.ndarray, axis: int) -> np.ndarray:
    t = np.tensordot(u, t, axes=([1], [axis]))
    return np.moveaxis(t, 0, axis)


def _index(n: int, fixed: Mapping[int, int]) -> tuple:
    sl = [slice(None)] * n
    for ax, v in fixed.items():
        sl[ax] = v
    return tuple(sl)


def apply_gate(state: PureState, gate: Gate, classical: Mapping[str, int] | None = None) -> PureState:
    if gate.condition is not None and not evaluate_condition(gate.condition, classical or {}):
        return state
    n = state.n
    axes = [state.register.index(q) for q in gate.qubits]
    t = state.tensor()
    if gate.kind in ONE_QUBIT:
        t = _apply_1q(t, gate.unitary_1q(), axes[0])
    else:
        c, tg = axes
        sub = t[_index(n, {c: 1})]
        # after fixing the control axis, the target axis shifts down if it came later
        tgt_axis = tg - 1 if tg > c else tg
        if gate.kind == "CNOT":
            sub = np.flip(sub, axis=tgt_axis)
        elif gate.kind == "CZ":
            sub = sub.copy()
            sub[_index(n - 1, {tgt_axis: 1})] *= -1
        else:
            sub = _apply_1q(sub, gate.matrix, tgt_axis)
        t[_index(n, {c: 1})] = sub
    return PureState(state.register, t.reshape(-1))


def _project(state: PureState, keep: np.ndarray) -> tuple[float, PureState | None]:
    amps = np.where(keep, state.amplitudes, 0)
    prob = float(np.sum(np.abs(amps) ** 2))
    if prob < PRUNE_TOL:
        return prob, None
    return prob, PureState(state.register, amps / math.sqrt(prob))


def _bit_column(state: PureState, label: str) -> np.ndarray:
    n = state.n
    pos = n - 1 - state.register.index(label)
    return (np.arange(2 ** n) >> pos) & 1


def parity_measure(state: PureState, q1: str, q2: str, out: str = "p") -> list[BranchResult]:
    """Branches of a parity measurement, ``p = 0`` first; null branches dropped."""
    if q1 == q2:
        raise ValueError(f"parity measurement needs two distinct qubits, got {q1!r} twice")
    parity = _bit_column(state, q1) ^ _bit_column(state, q2)
    branches = []
    for p in (0, 1):
        prob, post = _project(state, parity == p)
        if post is not None:
            branches.append(BranchResult({out: p}, prob, post))
    return branches


def measure_z(state: PureState, q: str, out: str = "m") -> list[BranchResult]:
    bit = _bit_column(state, q)
    branches = []
    for v in (0, 1):
        prob, post = _project(state, bit == v)
        if post is not None:
            branches.append(BranchResult({out: v}, prob, post))
    return branches


def _measure(state: PureState, step: Step) -> list[BranchResult]:
    if isinstance(step, ParityMeasurement):
        return parity_measure(state, step.q1, step.q2, step.out)
    return measure_z(state, step.q, step.out)


def _check_input(circuit: Circuit, state: PureState):
    if state.register.labels != circuit.register.labels:
        raise ValueError(
            f"input register {state.register.labels} does not match circuit register {circuit.register.labels}"
        )


def run_steps(steps: Sequence[Step], state: PureState, classical: Mapping[str, int] | None = None) -> list[BranchResult]:
    """Depth-first branch enumeration of ``steps`` starting from known bits."""
    results: list[BranchResult] = []

    def walk(i: int, st: PureState, bits: dict[str, int], prob: float):
        while i < len(steps) and isinstance(steps[i], Gate):
            st = apply_gate(st, steps[i], bits)
            i += 1
        if i == len(steps):
            results.append(BranchResult(bits, prob, st))
            return
        for br in _measure(st, steps[i]):
            walk(i + 1, br.state, {**bits, **br.outcomes}, prob * br.probability)

    walk(0, state, dict(classical or {}), 1.0)
    return results


def execute_all_branches(circuit: Circuit, state: PureState) -> list[BranchResult]:
    _check_input(circuit, state)
    return run_steps(circuit.steps, state)


def execute_sample(circuit: Circuit, state: PureState, seed: int) -> BranchResult:
    """One branch drawn with Born probabilities from a seeded PCG64 stream."""
    _check_input(circuit, state)
    rng = np.random.default_rng(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    bits: dict[str, int] = {}
    prob = 1.0
    for step in circuit.steps:
        if isinstance(step, Gate):
            state = apply_gate(state, step, bits)
            continue
        branches = _measure(state, step)
        u = rng.random()
        acc = 0.0
        chosen = branches[-1]
        for br in branches:
            acc += br.probability
            if u < acc:
                chosen = br
                break
        state = chosen.state
        bits.update(chosen.outcomes)
        prob *= chosen.probability
    return BranchResult(bits, prob, state)
