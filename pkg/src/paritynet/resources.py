"""Resource counts for n-GHZ preparation, from closed forms and from circuits."""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields

from .circuits import Circuit, Gate, ParityMeasurement, ZMeasurement

SCHEMES = ("native", "cnot_based")


@dataclass(frozen=True)
class ResourceTally:
    ancillae: int = 0
    ancilla_measurements: int = 0
    p_gates: int = 0
    hadamards: int = 0
    post_processing: int = 0
    cnots: int = 0

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f"{f.name} must be non-negative")

    def as_dict(self) -> dict[str, int]:
        return asdict(self)


TABLE_ROWS = ("ancillae", "ancilla_measurements", "p_gates", "hadamards", "post_processing")


def count_ghz_resources(n: int, scheme: str = "native") -> ResourceTally:
    if n < 2:
        raise ValueError(f"GHZ resource count needs n >= 2, got {n}")
    if scheme == "native":
        return ResourceTally(0, 0, n - 1, n, n - 1)
    if scheme == "cnot_based":
        return ResourceTally(n - 1, n - 1, 2 * (n - 1), 5 * n - 4, 2 * (n - 1))
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def tally_circuit(circuit: Circuit) -> ResourceTally:
    """Count steps by kind; conditioned gates count as post-processing only."""
    reg = circuit.register
    ancillas = {q.label for q in reg.qubits if q.ancilla}
    counts = dict.fromkeys(("p_gates", "hadamards", "post_processing", "cnots", "ancilla_measurements"), 0)
    for step in circuit.steps:
        if isinstance(step, ParityMeasurement):
            counts["p_gates"] += 1
        elif isinstance(step, ZMeasurement):
            if step.q in ancillas:
                counts["ancilla_measurements"] += 1
        elif isinstance(step, Gate):
            if step.condition is not None:
                counts["post_processing"] += 1
            elif step.kind == "H":
                counts["hadamards"] += 1
            elif step.kind == "CNOT":
                counts["cnots"] += 1
    return ResourceTally(ancillae=len(ancillas), **counts)


def format_table(n: int) -> str:
    native, cnot = count_ghz_resources(n, "native"), count_ghz_resources(n, "cnot_based")
    width = max(len(r) for r in TABLE_ROWS)
    lines = [f"{'n = ' + str(n):<{width}}  {'native':>8}  {'CNOT-based':>10}"]
    for row in TABLE_ROWS:
        lines.append(f"{row:<{width}}  {getattr(native, row):>8}  {getattr(cnot, row):>10}")
    return "\n".join(lines)
