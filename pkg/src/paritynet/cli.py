"""Command-line entry point: ``python -m paritynet <command> ...``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import graphstate, hybrid, paritygate, protocols, resources
from .circuits import H, Circuit, apply_gate, execute_all_branches, execute_sample
from .qstate import PureState, QubitRegister, basis_state, bell_state, fidelity_up_to_global_phase, ghz_state, plus_state

PROTOCOLS = ("bell", "analyzer", "teleport", "ghz", "fuse", "hybrid-ghz", "cz", "new-cz")


def _round(obj):
    if isinstance(obj, float):
        v = float(f"{obj:.12g}")
        return 0.0 if v == 0 else v
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def _dump(obj) -> str:
    return json.dumps(_round(obj), indent=2)


def _load_json_arg(text: str):
    path = Path(text)
    if not text.lstrip().startswith(("{", "[")) and path.exists():
        text = path.read_text()
    return json.loads(text)


def _input_state(args, n: int, default: PureState) -> PureState:
    if args.input_state is None:
        return default
    st = PureState.from_json(_load_json_arg(args.input_state))
    if st.n != n:
        raise ValueError(f"--input-state has {st.n} qubits, protocol needs {n}")
    return st


def _protocol_and_target(args):
    """(Protocol, expected corrected state or None)."""
    name = args.protocol
    if name == "bell":
        x, y = args.x or 0, args.y or 0
        target = bell_state(0, x ^ y)
        return protocols.bell_protocol(x, y), target
    if name == "analyzer":
        default = bell_state(args.x or 0, args.y or 0)
        st = _input_state(args, 2, default)
        proto = protocols.analyzer_protocol(st, args.variant)
        is_bell = any(
            fidelity_up_to_global_phase(proto.initial, bell_state(i, j)) > 1 - args.tolerance
            for i in (0, 1)
            for j in (0, 1)
        )
        if not is_bell:
            return proto, None
        target = proto.initial
        if args.variant == "two_hadamard":
            target = apply_gate(apply_gate(target, H("q1")), H("q2"))
        return proto, target
    if name == "teleport":
        psi = _input_state(args, 1, protocols.ket_plus_phase(math.pi / 3))
        return protocols.teleport_protocol(psi), psi.relabel(QubitRegister.of("B"))
    if name == "ghz":
        n = args.n or 3
        return protocols.ghz_chain_protocol(n), ghz_state(n)
    if name == "fuse":
        n, m = args.n or 2, args.m or 2
        proto = protocols.ghz_fusion_protocol(n, m)
        return proto, ghz_state(n + m, proto.raw.register)
    if name == "hybrid-ghz":
        n = args.n or 2
        return hybrid.hybrid_ghz_protocol(n), hybrid.target_ghz_pair(n)
    if name == "cz":
        st = _input_state(args, 2, plus_state(2))
        proto = protocols.cz_via_parity_protocol(st)
        return proto, protocols.cz_matrix_oracle(st.relabel(QubitRegister.of("q1", "q2")))
    if name == "new-cz":
        st = _input_state(args, 2, plus_state(2))
        proto = hybrid.new_cz_protocol(st)
        spins = QubitRegister((hybrid.NEW_CZ_REGISTER.qubit("s1"), hybrid.NEW_CZ_REGISTER.qubit("s2")))
        return proto, protocols.cz_matrix_oracle(st.relabel(spins))
    raise ValueError(f"unknown protocol {name!r}")


def _run_graph_fusion(args, out) -> int:
    g = graphstate.Graph.from_json(_load_json_arg(args.graph))
    if args.q1 is None or args.q2 is None:
        raise ValueError("fuse --graph needs --q1 and --q2")
    branches = graphstate.parity_fuse(g, args.q1, args.q2)
    if args.branches == "sample":
        rng = np.random.default_rng(args.seed)
        u = rng.random()
        acc, pick = 0.0, branches[-1]
        for br in branches:
            acc += br.probability
            if u < acc:
                pick = br
                break
        branches = [pick]
    rows, ok = [], True
    for br in branches:
        target = graphstate.graph_state(br.graph)
        fid = fidelity_up_to_global_phase(br.corrected, target)
        stab = graphstate.stabilizer_check(br.corrected, br.graph)
        ok &= fid >= 1 - args.tolerance and stab
        row = {
            "outcomes": {"p": br.p},
            "probability": br.probability,
            "corrected_fidelity": fid,
            "stabilizer_check": stab,
            "graph": br.graph.to_json(),
            "correction": " ".join(br.correction.factors),
        }
        if args.states:
            row["state"] = br.state.to_json()
            row["corrected_state"] = br.corrected.to_json()
        rows.append(row)
    if args.json:
        print(_dump(rows), file=out)
    else:
        for r in rows:
            print(
                f"p={r['outcomes']['p']}  prob={r['probability']:.12g}  fidelity={r['corrected_fidelity']:.12g}  "
                f"stabilizer={'ok' if r['stabilizer_check'] else 'FAIL'}  edges={r['graph']['edges']}",
                file=out,
            )
    return 0 if ok else 1


def cmd_run(args, out) -> int:
    if args.protocol == "fuse" and args.graph is not None:
        return _run_graph_fusion(args, out)
    proto, target = _protocol_and_target(args)
    branches = proto.branches() if args.branches == "all" else [proto.sample(args.seed)]
    rows, ok = [], True
    for br in branches:
        row = {"outcomes": dict(sorted(br.outcomes.items())), "probability": br.probability}
        if target is not None:
            fid = fidelity_up_to_global_phase(br.corrected, target)
            row["corrected_fidelity"] = fid
            ok &= fid >= 1 - args.tolerance
        if args.states:
            row["state"] = br.state.to_json()
            row["corrected_state"] = br.corrected.to_json()
        rows.append(row)
    if args.json:
        print(_dump(rows), file=out)
    else:
        for r in rows:
            bits = " ".join(f"{k}={v}" for k, v in r["outcomes"].items())
            line = f"{bits or '-'}  prob={r['probability']:.12g}"
            if "corrected_fidelity" in r:
                line += f"  fidelity={r['corrected_fidelity']:.12g}"
            print(line, file=out)
    return 0 if ok else 1


def cmd_verify(args, out) -> int:
    rows = []
    for ident, res in paritygate.verify_suite(args.trials, args.seed, args.tolerance, args.swap_lines):
        rows.append(
            {"identity": ident.name, "trials": res.trials, "pass": res.equal, "max_deviation": res.max_deviation}
        )
    if args.json:
        print(_dump(rows), file=out)
    else:
        width = max(len(r["identity"]) for r in rows)
        print(f"{'identity':<{width}}  {'trials':>6}  result  max deviation", file=out)
        for r in rows:
            verdict = "PASS" if r["pass"] else "FAIL"
            print(f"{r['identity']:<{width}}  {r['trials']:>6}  {verdict:<6}  {r['max_deviation']:.12g}", file=out)
    return 0 if all(r["pass"] for r in rows) else 1


def cmd_count(args, out) -> int:
    n = args.n
    native = resources.count_ghz_resources(n, "native")
    walked = resources.tally_circuit(protocols.ghz_chain_protocol(n).circuit)
    if args.json:
        cols = {
            "n": n,
            "native": {k: getattr(native, k) for k in resources.TABLE_ROWS},
            "cnot_based": {k: getattr(resources.count_ghz_resources(n, "cnot_based"), k) for k in resources.TABLE_ROWS},
            "native_walked": {k: getattr(walked, k) for k in resources.TABLE_ROWS},
        }
        print(_dump(cols), file=out)
    else:
        print(resources.format_table(n), file=out)
    agree = all(getattr(native, k) == getattr(walked, k) for k in resources.TABLE_ROWS)
    return 0 if agree else 1


def cmd_exec(args, out) -> int:
    circuit = Circuit.from_json(_load_json_arg(args.circuit))
    if args.input_state is not None:
        st = PureState.from_json(_load_json_arg(args.input_state))
        if st.n != len(circuit.register):
            raise ValueError(f"--input-state has {st.n} qubits, circuit has {len(circuit.register)}")
        st = st.relabel(circuit.register)
    else:
        st = basis_state(circuit.register, (0,) * len(circuit.register))
    if args.branches == "all":
        branches = execute_all_branches(circuit, st)
    else:
        branches = [execute_sample(circuit, st, args.seed)]
    rows = [
        {"outcomes": dict(sorted(b.outcomes.items())), "probability": b.probability, "state": b.state.to_json()}
        for b in branches
    ]
    if args.json:
        print(_dump(rows), file=out)
    else:
        for r in rows:
            bits = " ".join(f"{k}={v}" for k, v in r["outcomes"].items())
            amps = " ".join(f"{complex(re, im):.12g}" for re, im in r["state"]["amplitudes"])
            print(f"{bits or '-'}  prob={r['probability']:.12g}  amplitudes: {amps}", file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for --branches sample and random trials")
    common.add_argument("--branches", choices=("all", "sample"), default="all")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--tolerance", type=float, default=1e-9)

    parser = argparse.ArgumentParser(prog="paritynet", description="Parity-gate network simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="run a named protocol")
    run.add_argument("protocol", choices=PROTOCOLS)
    run.add_argument("--n", type=int)
    run.add_argument("--m", type=int)
    run.add_argument("--x", type=int, choices=(0, 1))
    run.add_argument("--y", type=int, choices=(0, 1))
    run.add_argument("--variant", choices=("two_hadamard", "four_hadamard"), default="four_hadamard")
    run.add_argument("--input-state", help="state JSON (inline or file path)")
    run.add_argument("--graph", help="graph JSON for 'fuse' (inline or file path)")
    run.add_argument("--q1", type=int)
    run.add_argument("--q2", type=int)
    run.add_argument("--states", action="store_true", help="include raw and corrected states in the output")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify-identities", parents=[common], help="check the parity-gate identities")
    ver.add_argument("--trials", type=int, default=50)
    ver.add_argument("--swap-lines", action="store_true")
    ver.set_defaults(func=cmd_verify)

    cnt = sub.add_parser("count-resources", parents=[common], help="n-GHZ resource table")
    cnt.add_argument("--n", type=int, required=True)
    cnt.set_defaults(func=cmd_count)

    ex = sub.add_parser("exec", parents=[common], help="execute a circuit JSON file")
    ex.add_argument("circuit")
    ex.add_argument("--input-state", help="state JSON (inline or file path)")
    ex.set_defaults(func=cmd_exec)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"paritynet: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
