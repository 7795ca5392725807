"""Graph states, stabilizer checks and deterministic parity fusion."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .circuits import CZ, H, P, Circuit, apply_gate, execute_all_branches
from .qstate import MAX_QUBITS, PauliString, PureState, QubitRegister, apply_pauli_string, plus_state

STABILIZER_TOL = 1e-9


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[tuple[int, int]]

    def __init__(self, n: int, edges: Iterable[Iterable[int]] = ()):
        norm = set()
        for e in edges:
            a, b = (int(v) for v in e)
            if a == b:
                raise ValueError(f"self-loop at vertex {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a}, {b}) outside vertices 0..{n - 1}")
            norm.add((min(a, b), max(a, b)))
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "edges", frozenset(norm))

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    def neighbors(self, v: int) -> set[int]:
        return {b if a == v else a for a, b in self.edges if v in (a, b)}

    def components(self) -> list[set[int]]:
        seen, comps = set(), []
        for s in range(self.n):
            if s in seen:
                continue
            comp, stack = set(), [s]
            while stack:
                v = stack.pop()
                if v in comp:
                    continue
                comp.add(v)
                stack.extend(self.neighbors(v) - comp)
            seen |= comp
            comps.append(comp)
        return comps

    def register(self) -> QubitRegister:
        return QubitRegister.of(*(f"v{i}" for i in range(self.n)))

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in sorted(self.edges)]}

    @classmethod
    def from_json(cls, data: dict | str) -> "Graph":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(data["n"], data["edges"])


def star_graph(n: int, center: int = 0) -> Graph:
    return Graph(n, [(center, v) for v in range(n) if v != center])


def grid_graph(rows: int, cols: int) -> Graph:
    idx = lambda r, c: r * cols + c  # noqa: E731
    edges = [(idx(r, c), idx(r, c + 1)) for r in range(rows) for c in range(cols - 1)]
    edges += [(idx(r, c), idx(r + 1, c)) for r in range(rows - 1) for c in range(cols)]
    return Graph(rows * cols, edges)


def random_graph(n: int, rng: np.random.Generator, density: float = 0.5) -> Graph:
    return Graph(n, [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < density])


def graph_state(g: Graph) -> PureState:
    if g.n > MAX_QUBITS:
        raise ValueError(f"graph on {g.n} vertices exceeds {MAX_QUBITS} qubits")
    reg = g.register()
    st = plus_state(g.n, reg)
    for a, b in sorted(g.edges):
        st = apply_gate(st, CZ(f"v{a}", f"v{b}"))
    return st


def stabilizer_generator(g: Graph, v: int) -> PauliString:
    """``K_v = X_v prod_{u ~ v} Z_u``."""
    x = [0] * g.n
    z = [0] * g.n
    x[v] = 1
    for u in g.neighbors(v):
        z[u] = 1
    return PauliString.from_bits(x, z)


def stabilizer_check(state: PureState, g: Graph, tol: float = STABILIZER_TOL) -> bool:
    if state.n != g.n:
        return False
    for v in range(g.n):
        image = apply_pauli_string(state, stabilizer_generator(g, v))
        if np.max(np.abs(image.amplitudes - state.amplitudes)) > tol:
            return False
    return True


def fused_graph(g: Graph, q1: int, q2: int) -> Graph:
    """Graph after fusing ``q1`` into ``q2``.

    ``q2`` takes the symmetric difference of both neighbourhoods and ``q1``
    becomes a leaf hanging off ``q2``.
    """
    n1, n2 = g.neighbors(q1), g.neighbors(q2)
    keep = [e for e in g.edges if q1 not in e and q2 not in e]
    new_n2 = (n1 ^ n2) - {q1, q2}
    return Graph(g.n, keep + [(q2, k) for k in new_n2] + [(q1, q2)])


def fusion_correction(g: Graph, q2: int, p: int) -> PauliString:
    """``X_{q2}^p [Z^{(q2)}]^p``, with Z on the original neighbours of ``q2``."""
    x = [0] * g.n
    z = [0] * g.n
    if p:
        x[q2] = 1
        for k in g.neighbors(q2):
            z[k] = 1
    return PauliString.from_bits(x, z)


@dataclass(frozen=True)
class FusionBranch:
    p: int
    probability: float
    state: PureState
    graph: Graph
    correction: PauliString

    @property
    def corrected(self) -> PureState:
        return apply_pauli_string(self.state, self.correction.dagger())


def fusion_circuit(g: Graph, q1: int, q2: int) -> Circuit:
    return Circuit(g.register(), (P(f"v{q1}", f"v{q2}", "p"), H(f"v{q1}")))


def parity_fuse(g: Graph, q1: int, q2: int) -> list[FusionBranch]:
    """P on ``(q1, q2)`` then H on ``q1``, applied to ``|G>``; one entry per outcome."""
    if q1 == q2:
        raise ValueError("fusion needs two distinct vertices")
    if g.has_edge(q1, q2):
        raise ValueError(f"({q1}, {q2}) is already an edge")
    target = fused_graph(g, q1, q2)
    out = []
    for br in execute_all_branches(fusion_circuit(g, q1, q2), graph_state(g)):
        p = br.outcomes["p"]
        out.append(FusionBranch(p, br.probability, br.state, target, fusion_correction(g, q2, p)))
    return out
