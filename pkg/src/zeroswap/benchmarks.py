"""Bundled benchmark circuits and a seeded random-circuit generator."""
from __future__ import annotations

import math
from importlib import resources

import numpy as np

from .qasm import CZ, U3, Circuit, parse_qasm

BENCHMARKS = ("fredkin", "adv", "add", "qft", "qaoa", "hlf", "qv", "tfim", "qec", "wst", "ghz")


def benchmark_path(name):
    return resources.files("zeroswap").joinpath(f"data/benchmarks/{name}.qasm")


def load_benchmark(name):
    if name not in BENCHMARKS:
        raise KeyError(f"unknown benchmark {name!r}")
    return parse_qasm(benchmark_path(name).read_text(encoding="utf-8"))


def random_circuit(n_qubits, n_gates, seed, cz_fraction=0.5):
    """Random {U3, CZ} circuit; CZ partners drawn uniformly among distinct pairs."""
    rng = np.random.default_rng(seed)
    ops = []
    for _ in range(n_gates):
        if n_qubits > 1 and rng.random() < cz_fraction:
            a, b = rng.choice(n_qubits, size=2, replace=False)
            ops.append((CZ, (int(a), int(b)), ()))
        else:
            q = int(rng.integers(n_qubits))
            angles = rng.uniform(-math.pi, math.pi, size=3)
            ops.append((U3, (q,), tuple(float(a) for a in angles)))
    return Circuit.from_ops(n_qubits, ops)
