"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v -s``.
"""
import itertools
import time

import numpy as np
import pytest

import oracle
from paritynet.graphstate import parity_fuse, random_graph, stabilizer_check
from paritynet.hybrid import (
    first_chain_states,
    hybrid_ghz,
    mode_bell,
    new_cz,
    new_cz_circuit,
    psi1_expected,
    psi3_expected,
    target_ghz_pair,
)
from paritynet.paritygate import verify_suite
from paritynet.protocols import (
    bell_analyzer,
    cz_via_parity,
    ghz_chain,
    ghz_chain_protocol,
    ghz_fusion,
    prepare_bell,
    split_teleport_branch,
    teleport,
)
from paritynet.qstate import (
    QubitRegister,
    apply_pauli_string,
    basis_state,
    bell_state,
    factor_out,
    fidelity_up_to_global_phase,
    ghz_state,
    pauli_x,
    plus_state,
    random_state,
)
from paritynet.resources import TABLE_ROWS, count_ghz_resources, tally_circuit

FULL = 1 - 1e-9
SPINS = QubitRegister.of("a", "b")


def fid(a, b):
    return fidelity_up_to_global_phase(a, b)


def c1_identities():
    t = time.perf_counter()
    worst, ok = 0.0, True
    for _, res in verify_suite(trials=50, seed=0, tol=1e-9):
        ok &= res.equal and res.max_deviation < 1e-9
        worst = max(worst, res.max_deviation)
    dt = time.perf_counter() - t
    return ok and dt < 5, f"max deviation {worst:.2e}, {dt:.2f} s"


def c2_bell():
    ok = True
    for x, y in itertools.product((0, 1), repeat=2):
        for b in prepare_bell(x, y):
            p = b.outcomes["p"]
            expected = (-1) ** (p * y) * bell_state(p, x ^ y).amplitudes
            ok &= np.max(np.abs(b.state.amplitudes - expected)) < 1e-10
    for i, j in itertools.product((0, 1), repeat=2):
        for variant in ("two_hadamard", "four_hadamard"):
            (b,) = bell_analyzer(bell_state(i, j), variant)
            ok &= (b.outcomes["i"], b.outcomes["j"]) == (i, j) and abs(b.probability - 1) < 1e-9
            if variant == "four_hadamard":
                ok &= fid(b.state, bell_state(i, j)) > FULL
    return ok, "8 preparation branches, 8 analyzer runs"


def c3_teleport():
    rng = np.random.default_rng(2024)
    ok, worst = True, 1.0
    alice_reg, bob_reg = QubitRegister.of("A1", "A2"), QubitRegister.of("B")
    for _ in range(20):
        psi = random_state(QubitRegister.of("q"), rng)
        for b in teleport(psi):
            p1, p2 = b.outcomes["p1"], b.outcomes["p2"]
            f = fid(b.corrected, psi.relabel(bob_reg))
            worst = min(worst, f)
            alice, _ = split_teleport_branch(b)
            ok &= fid(alice, bell_state(p2, p1, alice_reg)) > FULL
            bob = np.diag([1, (-1) ** p2]) @ psi.amplitudes
            if p1:
                bob = bob[::-1]
            raw = np.kron((-1) ** (p1 * p2) * bell_state(p2, p1, alice_reg).amplitudes, bob)
            ok &= np.max(np.abs(b.state.amplitudes - raw)) < 1e-10
    return ok and worst > FULL, f"min corrected fidelity {worst:.12f}"


def c4_ghz_chain():
    ok, dt8 = True, 0.0
    for n in range(2, 9):
        t = time.perf_counter()
        brs = ghz_chain(n)
        if n == 8:
            dt8 = time.perf_counter() - t
        ok &= len(brs) == 2 ** (n - 1)
        target = ghz_state(n)
        for b in brs:
            ok &= fid(b.corrected, target) > FULL and abs(b.probability - 2 ** -(n - 1)) < 1e-9
    return ok and dt8 < 10, f"n=2..8, n=8 in {dt8:.2f} s"


def c5_fusion():
    ok = True
    for n, m in ((2, 2), (3, 2), (4, 3)):
        for b in ghz_fusion(n, m):
            reg = b.state.register
            u = apply_pauli_string(ghz_state(n + m, reg), pauli_x((0,) * n + (b.outcomes["p"],) * m))
            ok &= np.max(np.abs(b.state.amplitudes - u.amplitudes)) < 1e-10
            ok &= fid(b.corrected, ghz_state(n + m, reg)) > FULL
    rng = np.random.default_rng(5)
    graphs = 0
    while graphs < 60:
        n = int(rng.integers(3, 9))
        g = random_graph(n, rng, float(rng.uniform(0.2, 0.7)))
        pairs = [(a, b) for a, b in itertools.permutations(range(n), 2) if not g.has_edge(a, b)]
        if not pairs:
            continue
        q1, q2 = pairs[rng.integers(len(pairs))]
        for br in parity_fuse(g, q1, q2):
            ok &= stabilizer_check(br.corrected, br.graph)
        graphs += 1
    return ok, f"3 GHZ fusions, {graphs} random graph fusions"


def c6_hybrid():
    ok, dt6 = True, 0.0
    for n in (2, 3, 4, 5, 6):
        t = time.perf_counter()
        brs = hybrid_ghz(n)
        if n == 6:
            dt6 = time.perf_counter() - t
        target = target_ghz_pair(n)
        ok &= len(brs) == 4 ** (n - 1) <= 4096
        for b in brs:
            ok &= fid(b.corrected, target) > FULL
            ok &= np.max(np.abs(b.state.amplitudes - psi3_expected(n, b.outcomes).amplitudes)) < 1e-10
        for b in first_chain_states(n):
            ok &= np.max(np.abs(b.state.amplitudes - psi1_expected(n, b.outcomes).amplitudes)) < 1e-10
    return ok and dt6 < 30, f"n=2..6, n=6 in {dt6:.2f} s"


def c7_new_cz():
    rng = np.random.default_rng(77)
    inputs = [basis_state(SPINS, bits) for bits in itertools.product((0, 1), repeat=2)]
    inputs += [random_state(SPINS, rng) for _ in range(20)]
    ok = True
    for s in inputs:
        target = oracle.cz_dense() @ s.amplitudes
        brs = new_cz(s)
        ok &= len(brs) == 8
        for b in brs:
            ok &= oracle.fidelity(b.corrected.amplitudes, target) > FULL
            modes, _ = factor_out(b.state, ("k1", "k2"))
            ok &= fid(modes, mode_bell(b.outcomes["p3"], b.outcomes["p2"])) > FULL
    t = tally_circuit(new_cz_circuit())
    ok &= (t.p_gates, t.hadamards, t.cnots) == (3, 4, 2)
    for _ in range(20):
        s = random_state(SPINS, rng)
        a = new_cz(s)[0].corrected.relabel(SPINS)
        for b in cz_via_parity(s):
            ok &= fid(a, b.corrected.relabel(SPINS)) > FULL
    return ok, f"{len(inputs)} inputs x 8 branches, tally {t.p_gates} P / {t.hadamards} H / {t.cnots} CNOT"


def c8_table():
    ok = True
    for n in range(2, 11):
        native = count_ghz_resources(n, "native")
        cnot = count_ghz_resources(n, "cnot_based")
        ok &= tuple(getattr(native, k) for k in TABLE_ROWS) == (0, 0, n - 1, n, n - 1)
        ok &= tuple(getattr(cnot, k) for k in TABLE_ROWS) == (n - 1, n - 1, 2 * (n - 1), 5 * n - 4, 2 * (n - 1))
        walked = tally_circuit(ghz_chain_protocol(n).circuit)
        ok &= all(getattr(walked, k) == getattr(native, k) for k in TABLE_ROWS)
    return ok, "n=2..10"


def _pairwise(states):
    return min((fid(a, b) for a, b in itertools.combinations(states, 2)), default=1.0)


def _graph_fusion_instance(rng):
    while True:
        g = random_graph(6, rng, 0.4)
        if not g.has_edge(0, 5):
            return parity_fuse(g, 0, 5)


def c9_determinism():
    rng = np.random.default_rng(9)
    runs = {
        "bell": [b.corrected for b in prepare_bell(1, 0)],
        "teleport": [b.corrected for b in teleport(random_state(QubitRegister.of("q"), rng))],
        "ghz": [b.corrected for b in ghz_chain(5)],
        "fuse": [b.corrected for b in ghz_fusion(3, 3)],
        "cz": [b.corrected for b in cz_via_parity(plus_state(2))],
        "graph-fuse": [b.corrected for b in _graph_fusion_instance(rng)],
        "hybrid-ghz": [b.corrected for b in hybrid_ghz(4)],
        "new-cz": [b.corrected for b in new_cz(random_state(SPINS, rng))],
    }
    worst = {k: _pairwise(v) for k, v in runs.items()}
    return all(w > FULL for w in worst.values()), f"{len(runs)} protocols, min pairwise fidelity {min(worst.values()):.12f}"


CRITERIA = [
    ("1 gate identities", c1_identities),
    ("2 Bell machinery", c2_bell),
    ("3 teleportation", c3_teleport),
    ("4 n-GHZ chain", c4_ghz_chain),
    ("5 fusion", c5_fusion),
    ("6 hybrid GHZ", c6_hybrid),
    ("7 new CZ", c7_new_cz),
    ("8 resource table", c8_table),
    ("9 determinism", c9_determinism),
]


@pytest.mark.parametrize("name, check", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_criterion(name, check, capsys):
    ok, detail = check()
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {name}: {detail}")
    assert ok, detail
