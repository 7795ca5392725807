"""Dense pure states over labelled qubit registers.

Basis ordering: qubit 0 of the register is the most significant bit of the
amplitude index, so ``|q0 q1 ... q{n-1}>`` reads left to right like a ket.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

MAX_QUBITS = 24
NORM_TOL = 1e-10

SPIN = "spin"
MODE = "mode"
ROLES = (SPIN, MODE)


@dataclass(frozen=True)
class Qubit:
    label: str
    role: str = SPIN
    electron: int | None = None
    ancilla: bool = False

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown qubit role {self.role!r}")

    def to_json(self) -> dict:
        d = {"label": self.label, "role": self.role, "electron": self.electron}
        if self.ancilla:
            d["ancilla"] = True
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Qubit":
        return cls(d["label"], d.get("role", SPIN), d.get("electron"), bool(d.get("ancilla", False)))


@dataclass(frozen=True)
class QubitRegister:
    qubits: tuple[Qubit, ...]

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        labels = self.labels
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate qubit labels in {labels}")
        if len(labels) > MAX_QUBITS:
            raise ValueError(f"register of {len(labels)} qubits exceeds {MAX_QUBITS}")
        owners: dict[int, list[str]] = {}
        for q in self.qubits:
            if q.electron is not None:
                owners.setdefault(q.electron, []).append(q.role)
        for e, roles in owners.items():
            if len(set(roles)) != len(roles):
                raise ValueError(f"electron {e} owns more than one {roles[0]} qubit")

    def is_hybrid_complete(self) -> bool:
        """Every electron index owns exactly one spin and one mode qubit."""
        owners: dict[int, list[str]] = {}
        for q in self.qubits:
            if q.electron is not None:
                owners.setdefault(q.electron, []).append(q.role)
        return bool(owners) and all(sorted(r) == [MODE, SPIN] for r in owners.values())

    @classmethod
    def of(cls, *labels: str) -> "QubitRegister":
        return cls(tuple(Qubit(lab) for lab in labels))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(q.label for q in self.qubits)

    def __len__(self) -> int:
        return len(self.qubits)

    def __contains__(self, label: str) -> bool:
        return label in self.labels

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown qubit label {label!r}") from None

    def qubit(self, label: str) -> Qubit:
        return self.qubits[self.index(label)]

    def without(self, labels: Iterable[str]) -> "QubitRegister":
        drop = set(labels)
        return QubitRegister(tuple(q for q in self.qubits if q.label not in drop))

    def __add__(self, other: "QubitRegister") -> "QubitRegister":
        return QubitRegister(self.qubits + other.qubits)

    def to_json(self) -> list[dict]:
        return [q.to_json() for q in self.qubits]

    @classmethod
    def from_json(cls, data: list[dict]) -> "QubitRegister":
        return cls(tuple(Qubit.from_json(d) for d in data))


def default_register(n: int, prefix: str = "q") -> QubitRegister:
    """Register with labels ``q1 .. qn``."""
    return QubitRegister.of(*(f"{prefix}{i + 1}" for i in range(n)))


@dataclass(frozen=True, eq=False)
class PureState:
    register: QubitRegister
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 2 ** len(self.register):
            raise ValueError(
                f"{amps.shape[0]} amplitudes for a {len(self.register)}-qubit register"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n(self) -> int:
        return len(self.register)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        """Writable copy shaped ``(2,) * n`` with axis i = register qubit i."""
        return self.amplitudes.reshape((2,) * self.n).copy()

    @classmethod
    def from_tensor(cls, register: QubitRegister, t: np.ndarray) -> "PureState":
        return cls(register, t.reshape(-1))

    def normalized(self) -> "PureState":
        nrm = self.norm
        if nrm == 0:
            raise ValueError("cannot normalize the zero vector")
        return PureState(self.register, self.amplitudes / nrm)

    def relabel(self, register: QubitRegister) -> "PureState":
        if len(register) != self.n:
            raise ValueError("relabel needs a register of the same size")
        return PureState(register, self.amplitudes)

    def kron(self, other: "PureState") -> "PureState":
        return PureState(self.register + other.register, np.kron(self.amplitudes, other.amplitudes))

    def permuted(self, labels: Sequence[str]) -> "PureState":
        """Same physical state with register qubits reordered to ``labels``."""
        if sorted(labels) != sorted(self.register.labels):
            raise ValueError("permutation must list every register label once")
        axes = [self.register.index(lab) for lab in labels]
        reg = QubitRegister(tuple(self.register.qubit(lab) for lab in labels))
        return PureState(reg, np.transpose(self.tensor(), axes).reshape(-1))

    def probability_of(self, label: str, bit: int) -> float:
        t = np.moveaxis(self.tensor(), self.register.index(label), 0)
        return float(np.sum(np.abs(t[bit]) ** 2))

    def discard(self, labels: Iterable[str]) -> "PureState":
        """Drop qubits that sit in a definite computational-basis value."""
        state = self
        for lab in labels:
            axis = state.register.index(lab)
            t = np.moveaxis(state.tensor(), axis, 0)
            weights = [np.sum(np.abs(t[b]) ** 2) for b in (0, 1)]
            bit = int(np.argmax(weights))
            if weights[1 - bit] > 1e-12:
                raise ValueError(f"qubit {lab!r} is not in a computational basis state")
            state = PureState(state.register.without([lab]), t[bit].reshape(-1))
        return state

    def to_json(self) -> dict:
        return {
            "register": self.register.to_json(),
            "amplitudes": [[_sig(a.real), _sig(a.imag)] for a in self.amplitudes],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PureState":
        reg = QubitRegister.from_json(data["register"])
        amps = [complex(re, im) for re, im in data["amplitudes"]]
        return cls(reg, np.array(amps, dtype=complex))


def _sig(x: float, digits: int = 12) -> float:
    v = float(f"{x:.{digits}g}")
    return 0.0 if v == 0 else v


# -- binary vectors ----------------------------------------------------------

def binary_parity(v: Sequence[int]) -> int:
    return sum(int(b) for b in v) % 2


def bits_to_index(bits: Sequence[int]) -> int:
    idx = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"binary vector entries must be 0 or 1, got {b!r}")
        idx = (idx << 1) | int(b)
    return idx


def index_to_bits(index: int, n: int) -> tuple[int, ...]:
    return tuple((index >> (n - 1 - i)) & 1 for i in range(n))


def complement(v: Sequence[int]) -> tuple[int, ...]:
    return tuple(1 - int(b) for b in v)


def prefix_xor(p: Sequence[int]) -> tuple[int, ...]:
    """``j`` with ``j_1 = p_1`` and ``j_i = j_{i-1} xor p_i``."""
    out, acc = [], 0
    for b in p:
        acc ^= int(b)
        out.append(acc)
    return tuple(out)


def basis_state(register: QubitRegister, index: Sequence[int]) -> PureState:
    if len(index) != len(register):
        raise ValueError(f"index of length {len(index)} for {len(register)} qubits")
    amps = np.zeros(2 ** len(register), dtype=complex)
    amps[bits_to_index(index)] = 1.0
    return PureState(register, amps)


# -- Pauli strings ------------------------------------------------------------

_FACTORS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "XZ": (1, 1)}
_PHASES = (1, -1, 1j, -1j)


@dataclass(frozen=True)
class PauliString:
    """Per-qubit factor ``X^x Z^z`` (Z acts first) times a global phase.

    ``"XZ"`` denotes the operator product X.Z, so ``XZ|1> = -|0>``.
    """

    factors: tuple[str, ...]
    phase: complex = 1

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        bad = [f for f in self.factors if f not in _FACTORS]
        if bad:
            raise ValueError(f"unknown Pauli factors {bad}")
        if not any(abs(self.phase - ph) < 1e-12 for ph in _PHASES):
            raise ValueError(f"phase must be one of +-1, +-i, got {self.phase}")

    @classmethod
    def from_bits(cls, x: Sequence[int], z: Sequence[int], phase: complex = 1) -> "PauliString":
        if len(x) != len(z):
            raise ValueError("x and z parts differ in length")
        inv = {v: k for k, v in _FACTORS.items()}
        return cls(tuple(inv[(int(a) & 1, int(b) & 1)] for a, b in zip(x, z)), phase)

    @property
    def x_bits(self) -> tuple[int, ...]:
        return tuple(_FACTORS[f][0] for f in self.factors)

    @property
    def z_bits(self) -> tuple[int, ...]:
        return tuple(_FACTORS[f][1] for f in self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    def __matmul__(self, other: "PauliString") -> "PauliString":
        """Operator product ``self . other`` (other acts first)."""
        if len(self) != len(other):
            raise ValueError("Pauli strings differ in length")
        # Z^b X^c = (-1)^{bc} X^c Z^b
        sign = (-1) ** sum(b * c for b, c in zip(self.z_bits, other.x_bits))
        x = [a ^ c for a, c in zip(self.x_bits, other.x_bits)]
        z = [b ^ d for b, d in zip(self.z_bits, other.z_bits)]
        return PauliString.from_bits(x, z, self.phase * other.phase * sign)

    def dagger(self) -> "PauliString":
        # (X^x Z^z)^dagger = Z^z X^x = (-1)^{xz} X^x Z^z
        sign = (-1) ** sum(a * b for a, b in zip(self.x_bits, self.z_bits))
        return PauliString(self.factors, np.conj(self.phase) * sign)


def pauli_x(v: Sequence[int]) -> PauliString:
    return PauliString.from_bits(v, [0] * len(v))


def pauli_z(v: Sequence[int]) -> PauliString:
    return PauliString.from_bits([0] * len(v), v)


def apply_pauli_string(state: PureState, pauli: PauliString) -> PureState:
    if len(pauli) != state.n:
        raise ValueError(f"Pauli string of length {len(pauli)} on {state.n} qubits")
    t = state.tensor()
    for axis, (x, z) in enumerate(zip(pauli.x_bits, pauli.z_bits)):
        if z:
            sl = [slice(None)] * state.n
            sl[axis] = 1
            t[tuple(sl)] *= -1
        if x:
            t = np.flip(t, axis=axis)
    return PureState(state.register, t.reshape(-1) * pauli.phase)


# -- comparison ---------------------------------------------------------------

def _check_same_register(a: PureState, b: PureState):
    if a.register.labels != b.register.labels:
        raise ValueError(f"register mismatch: {a.register.labels} vs {b.register.labels}")


def inner(a: PureState, b: PureState) -> complex:
    _check_same_register(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity_up_to_global_phase(a: PureState, b: PureState) -> float:
    f = abs(inner(a, b)) ** 2
    return float(min(1.0, max(0.0, f)))


def max_amplitude_deviation(a: PureState, b: PureState) -> float:
    _check_same_register(a, b)
    return float(np.max(np.abs(a.amplitudes - b.amplitudes)))


def factor_out(state: PureState, labels: Sequence[str], tol: float = 1e-9) -> tuple[PureState, PureState]:
    """Split a product state into (``labels`` part, remainder).

    Raises ValueError when the state is entangled across the cut. The phase of
    the extracted part is fixed so that its largest amplitude is real positive;
    the remainder absorbs the rest.
    """
    rest = [lab for lab in state.register.labels if lab not in labels]
    perm = state.permuted(list(labels) + rest)
    m = perm.amplitudes.reshape(2 ** len(labels), 2 ** len(rest))
    u, s, vh = np.linalg.svd(m)
    if len(s) > 1 and s[1] > tol:
        raise ValueError(f"state is entangled across {list(labels)} | {rest}")
    part = u[:, 0]
    k = int(np.argmax(np.abs(part)))
    part = part * (abs(part[k]) / part[k])
    remainder = part.conj() @ m
    reg = perm.register
    return (
        PureState(QubitRegister(reg.qubits[: len(labels)]), part),
        PureState(QubitRegister(reg.qubits[len(labels):]), remainder),
    )


# -- named states -------------------------------------------------------------

def bell_state(i: int, j: int, register: QubitRegister | None = None) -> PureState:
    """``(|0>|i> + (-1)^j |1>|i xor 1>) / sqrt 2``; i is the parity bit, j the sign bit."""
    if i not in (0, 1) or j not in (0, 1):
        raise ValueError("Bell indices must be bits")
    register = register or default_register(2)
    amps = np.zeros(4, dtype=complex)
    amps[bits_to_index((0, i))] = 1
    amps[bits_to_index((1, 1 - i))] = (-1) ** j
    return PureState(register, amps / math.sqrt(2))


def ghz_state(n: int, register: QubitRegister | None = None) -> PureState:
    if n < 2:
        raise ValueError(f"GHZ state needs n >= 2, got {n}")
    if n > MAX_QUBITS:
        raise ValueError(f"GHZ state of {n} qubits exceeds {MAX_QUBITS}")
    register = register or default_register(n)
    amps = np.zeros(2 ** n, dtype=complex)
    amps[0] = amps[-1] = 1 / math.sqrt(2)
    return PureState(register, amps)


def plus_state(n: int, register: QubitRegister | None = None) -> PureState:
    register = register or default_register(n)
    return PureState(register, np.full(2 ** n, 2 ** (-n / 2), dtype=complex))


def random_state(register: QubitRegister, rng: np.random.Generator) -> PureState:
    """Normalized i.i.d. complex Gaussian amplitudes."""
    dim = 2 ** len(register)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return PureState(register, v / np.linalg.norm(v))
