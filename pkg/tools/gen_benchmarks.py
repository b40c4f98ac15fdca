"""Regenerate the bundled benchmark QASM files.

Needs qiskit, which is not a runtime dependency of the package:

    pip install qiskit==1.2.4
    python tools/gen_benchmarks.py src/zeroswap/data/benchmarks
"""
import sys
from pathlib import Path

import numpy as np
from qiskit import QuantumCircuit, transpile
from qiskit.circuit.library import (
    CDKMRippleCarryAdder,
    HiddenLinearFunction,
    QFT,
    QuantumVolume,
)
from qiskit.circuit.random import random_circuit
from qiskit.qasm2 import dumps


def fredkin():
    qc = QuantumCircuit(3)
    qc.cswap(0, 1, 2)
    return qc, 1


def adv():
    qc = random_circuit(9, 6, max_operands=2, seed=7)
    return qc, 1


def add():
    qc = QuantumCircuit(9)
    qc.append(CDKMRippleCarryAdder(4, kind="fixed"), range(9))
    return qc, 1


def qft():
    return QFT(8).decompose(), 1


def qaoa():
    rng = np.random.default_rng(3)
    n = 10
    edges = {(i, (i + 1) % n) for i in range(n)}
    while len(edges) < 15:
        a, b = sorted(rng.choice(n, 2, replace=False))
        edges.add((int(a), int(b)))
    qc = QuantumCircuit(n)
    qc.h(range(n))
    for a, b in sorted(edges):
        qc.rzz(0.7, a, b)
    qc.rx(0.3, range(n))
    return qc, 1


def hlf():
    rng = np.random.default_rng(5)
    a = rng.integers(0, 2, (10, 10))
    a = np.triu(a) + np.triu(a, 1).T
    return HiddenLinearFunction(a.tolist()).decompose(), 1


def qv():
    return QuantumVolume(8, 4, seed=11).decompose(), 1


def tfim():
    n, steps = 12, 3
    qc = QuantumCircuit(n)
    for _ in range(steps):
        for i in range(n - 1):
            qc.rzz(0.2, i, i + 1)
        qc.rx(0.4, range(n))
    return qc, 1


def qec():
    # 5 data + 4 ancilla repetition code, two rounds
    qc = QuantumCircuit(9)
    for _ in range(2):
        for a in range(4):
            qc.cx(a, 5 + a)
            qc.cx(a + 1, 5 + a)
    return qc, 1


def wst():
    n = 8
    qc = QuantumCircuit(n)
    qc.x(0)
    for i in range(n - 1):
        theta = 2 * np.arccos(np.sqrt(1 / (n - i)))
        qc.cry(theta, i, i + 1)
        qc.cx(i + 1, i)
    return qc, 1


def ghz():
    qc = QuantumCircuit(12)
    qc.h(0)
    for i in range(11):
        qc.cx(i, i + 1)
    return qc, 1


BENCHMARKS = {
    "fredkin": fredkin,
    "adv": adv,
    "add": add,
    "qft": qft,
    "qaoa": qaoa,
    "hlf": hlf,
    "qv": qv,
    "tfim": tfim,
    "qec": qec,
    "wst": wst,
    "ghz": ghz,
}


def main(out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, build in BENCHMARKS.items():
        qc, level = build()
        t = transpile(qc, basis_gates=["u3", "cz"], optimization_level=level, seed_transpiler=0)
        (out / f"{name}.qasm").write_text(dumps(t))
        print(f"{name:8s} qubits={t.num_qubits:3d} depth={t.depth():4d} {dict(t.count_ops())}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "benchmarks")
