"""Zero-SWAP compiler and hardware-model simulator for neutral-atom arrays."""
from .config import CompileConfig, build_config
from .kernels import BACKEND
from .pipeline import compile_circuit
from .qasm import Circuit, Gate, load_qasm, parse_qasm

__all__ = ["BACKEND", "Circuit", "CompileConfig", "Gate", "build_config", "compile_circuit",
           "load_qasm", "parse_qasm"]
__version__ = "0.1.0"
