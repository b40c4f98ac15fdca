"""OpenQASM 2.0 frontend.

Parses a QASM 2.0 program into a :class:`Circuit` over the native
{U3, CZ} gate set. ``cx`` becomes H-CZ-H on the target, the usual
single-qubit gates become U3 with fixed angles, and ``measure`` /
``barrier`` are validated and dropped (every qubit is read out once at the
end of the circuit).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

U3 = "U3"
CZ = "CZ"

HALF_PI = math.pi / 2


class QasmError(ValueError):
    """Malformed or unsupported QASM input, with the offending position."""

    def __init__(self, message, line=0, col=0):
        self.message = message
        self.line = line
        self.col = col
        where = f"line {line}, col {col}: " if line else ""
        super().__init__(where + message)


@dataclass(frozen=True, slots=True)
class Gate:
    id: int
    kind: str
    qubits: tuple
    params: tuple = ()
    source_line: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.kind == U3:
            if len(self.qubits) != 1 or len(self.params) != 3:
                raise ValueError(f"U3 gate {self.id} needs 1 qubit and 3 angles")
            if not all(math.isfinite(p) for p in self.params):
                raise ValueError(f"U3 gate {self.id} has a non-finite angle")
        elif self.kind == CZ:
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError(f"CZ gate {self.id} needs 2 distinct qubits")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")


@dataclass(frozen=True)
class Circuit:
    """Gate list plus the per-qubit projection used for dependency tracking.

    Gate ids are their positions in ``gates``.
    """

    num_qubits: int
    gates: tuple = ()
    per_qubit_order: tuple = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        order = [[] for _ in range(self.num_qubits)]
        for pos, g in enumerate(self.gates):
            if g.id != pos:
                raise ValueError(f"gate id {g.id} does not match its position {pos}")
            for q in g.qubits:
                if not 0 <= q < self.num_qubits:
                    raise ValueError(f"gate {g.id} touches qubit {q} outside the register")
                order[q].append(g.id)
        object.__setattr__(self, "per_qubit_order", tuple(tuple(o) for o in order))

    @property
    def cz_count(self):
        return sum(1 for g in self.gates if g.kind == CZ)

    @property
    def u3_count(self):
        return sum(1 for g in self.gates if g.kind == U3)

    @classmethod
    def from_ops(cls, num_qubits, ops):
        """Build from ``(kind, qubits, params)`` triples, numbering gates in order."""
        gates = [Gate(i, kind, tuple(qs), tuple(float(p) for p in ps))
                 for i, (kind, qs, ps) in enumerate(ops)]
        return cls(num_qubits, tuple(gates))


def next_ready_gate(circuit, executed, qubit):
    """Earliest unexecuted gate on ``qubit`` if it is ready on all its operands."""
    gid = None
    for cand in circuit.per_qubit_order[qubit]:
        if cand not in executed:
            gid = cand
            break
    if gid is None:
        return None
    gate = circuit.gates[gid]
    for q in gate.qubits:
        if q == qubit:
            continue
        for prev in circuit.per_qubit_order[q]:
            if prev == gid:
                break
            if prev not in executed:
                return None
    return gate


def dependency_layers(circuit):
    """ASAP layering: lists of gate ids, each gate one layer after its latest predecessor."""
    depth = [0] * circuit.num_qubits
    layers = []
    for g in circuit.gates:
        level = max(depth[q] for q in g.qubits)
        if level == len(layers):
            layers.append([])
        layers[level].append(g.id)
        for q in g.qubits:
            depth[q] = level + 1
    return layers


# --------------------------------------------------------------------- lexing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<real>(?:\d+\.\d*|\.\d+)(?:[eE][-+]?\d+)?|\d+[eE][-+]?\d+)
  | (?P<int>\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<arrow>->)
  | (?P<eq>==)
  | (?P<sym>[;,()\[\]{}+\-*/^])
    """,
    re.VERBOSE,
)


@dataclass(slots=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text):
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise QasmError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


# ---------------------------------------------------------------- expressions

_FUNCS = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan,
    "exp": math.exp, "ln": math.log, "sqrt": math.sqrt,
}


def _eval(node, env):
    tag = node[0]
    if tag == "num":
        return node[1]
    if tag == "var":
        _, name, line, col = node
        if name not in env:
            raise QasmError(f"unknown parameter {name!r}", line, col)
        return env[name]
    if tag == "neg":
        return -_eval(node[1], env)
    if tag == "call":
        return _FUNCS[node[1]](_eval(node[2], env))
    _, op, a, b = node
    x, y = _eval(a, env), _eval(b, env)
    if op == "+":
        return x + y
    if op == "-":
        return x - y
    if op == "*":
        return x * y
    if op == "/":
        return x / y
    return x ** y


# -------------------------------------------------------------- native gates

def _u3(t, p, l):
    return [(U3, (0,), (t, p, l))]


# name -> (n_params, n_qubits, expansion(params) -> [(kind, local qubit idx, angles)])
_BUILTINS = {
    "u3": (3, 1, lambda a: _u3(*a)),
    "u": (3, 1, lambda a: _u3(*a)),
    "U": (3, 1, lambda a: _u3(*a)),
    "u2": (2, 1, lambda a: _u3(HALF_PI, a[0], a[1])),
    "u1": (1, 1, lambda a: _u3(0.0, 0.0, a[0])),
    "p": (1, 1, lambda a: _u3(0.0, 0.0, a[0])),
    "rz": (1, 1, lambda a: _u3(0.0, 0.0, a[0])),
    "rx": (1, 1, lambda a: _u3(a[0], -HALF_PI, HALF_PI)),
    "ry": (1, 1, lambda a: _u3(a[0], 0.0, 0.0)),
    "h": (0, 1, lambda a: _u3(HALF_PI, 0.0, math.pi)),
    "x": (0, 1, lambda a: _u3(math.pi, 0.0, math.pi)),
    "y": (0, 1, lambda a: _u3(math.pi, HALF_PI, HALF_PI)),
    "z": (0, 1, lambda a: _u3(0.0, 0.0, math.pi)),
    "s": (0, 1, lambda a: _u3(0.0, 0.0, HALF_PI)),
    "sdg": (0, 1, lambda a: _u3(0.0, 0.0, -HALF_PI)),
    "t": (0, 1, lambda a: _u3(0.0, 0.0, math.pi / 4)),
    "tdg": (0, 1, lambda a: _u3(0.0, 0.0, -math.pi / 4)),
    "id": (0, 1, lambda a: []),
    "cz": (0, 2, lambda a: [(CZ, (0, 1), ())]),
    "cx": (0, 2, lambda a: [(U3, (1,), (HALF_PI, 0.0, math.pi)),
                            (CZ, (0, 1), ()),
                            (U3, (1,), (HALF_PI, 0.0, math.pi))]),
    "CX": (0, 2, lambda a: [(U3, (1,), (HALF_PI, 0.0, math.pi)),
                            (CZ, (0, 1), ()),
                            (U3, (1,), (HALF_PI, 0.0, math.pi))]),
}


@dataclass
class _GateDef:
    params: list
    args: list
    body: list  # (name, param_nodes, arg_names, line, col)


# ------------------------------------------------------------------- parser

class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0
        self.qreg = None  # (name, size)
        self.cregs = {}
        self.defs = {}
        self.ops = []  # (kind, qubits, params, line)

    # token helpers
    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text=None, kind=None):
        tok = self.next()
        if (text is not None and tok.text != text) or (kind is not None and tok.kind != kind):
            want = repr(text) if text is not None else kind
            got = repr(tok.text) if tok.kind != "eof" else "end of input"
            raise QasmError(f"expected {want}, got {got}", tok.line, tok.col)
        return tok

    def accept(self, text):
        if self.peek().text == text:
            self.i += 1
            return True
        return False

    # grammar
    def parse(self):
        tok = self.peek()
        if tok.text != "OPENQASM":
            raise QasmError("missing 'OPENQASM 2.0;' header", tok.line, tok.col)
        self.next()
        ver = self.next()
        if ver.text not in ("2.0", "2"):
            raise QasmError(f"unsupported OpenQASM version {ver.text}", ver.line, ver.col)
        self.expect(";")
        while self.peek().kind != "eof":
            self.statement()
        if self.qreg is None:
            tok = self.peek()
            raise QasmError("program declares no quantum register", tok.line, tok.col)
        return self.qreg[1], self.ops

    def statement(self):
        tok = self.peek()
        word = tok.text
        if word == "include":
            self.next()
            name = self.expect(kind="string")
            if name.text.strip('"') != "qelib1.inc":
                raise QasmError(f"cannot include {name.text}", name.line, name.col)
            self.expect(";")
        elif word == "qreg":
            self.next()
            name, size = self.reg_decl()
            if self.qreg is not None:
                raise QasmError("only one quantum register is supported", tok.line, tok.col)
            self.qreg = (name, size)
        elif word == "creg":
            self.next()
            name, size = self.reg_decl()
            self.cregs[name] = size
        elif word == "gate":
            self.next()
            self.gate_def()
        elif word == "measure":
            self.next()
            self.measure()
        elif word == "barrier":
            self.next()
            self.arg_list()
            self.expect(";")
        elif word == "if":
            raise QasmError("classical conditionals are not supported", tok.line, tok.col)
        elif word in ("opaque", "reset"):
            raise QasmError(f"'{word}' is not supported", tok.line, tok.col)
        elif tok.kind == "id":
            self.gate_call()
        else:
            raise QasmError(f"unexpected token {tok.text!r}", tok.line, tok.col)

    def reg_decl(self):
        name = self.expect(kind="id").text
        self.expect("[")
        size_tok = self.expect(kind="int")
        self.expect("]")
        self.expect(";")
        size = int(size_tok.text)
        if size < 1:
            raise QasmError("register size must be positive", size_tok.line, size_tok.col)
        return name, size

    def gate_def(self):
        name_tok = self.expect(kind="id")
        params = []
        if self.accept("("):
            if not self.accept(")"):
                params.append(self.expect(kind="id").text)
                while self.accept(","):
                    params.append(self.expect(kind="id").text)
                self.expect(")")
        args = [self.expect(kind="id").text]
        while self.accept(","):
            args.append(self.expect(kind="id").text)
        self.expect("{")
        body = []
        while not self.accept("}"):
            tok = self.next()
            if tok.kind == "eof":
                raise QasmError("unterminated gate body", tok.line, tok.col)
            if tok.text == "barrier":
                while self.next().text != ";":
                    pass
                continue
            if tok.kind != "id":
                raise QasmError(f"unexpected token {tok.text!r} in gate body", tok.line, tok.col)
            pnodes = self.param_list()
            names = [self.expect(kind="id").text]
            while self.accept(","):
                names.append(self.expect(kind="id").text)
            self.expect(";")
            for n in names:
                if n not in args:
                    raise QasmError(f"unknown gate argument {n!r}", tok.line, tok.col)
            body.append((tok.text, pnodes, names, tok.line, tok.col))
        self.defs[name_tok.text] = _GateDef(params, args, body)

    def measure(self):
        src = self.argument()
        self.expect("->")
        tok = self.expect(kind="id")
        if tok.text not in self.cregs:
            raise QasmError(f"unknown classical register {tok.text!r}", tok.line, tok.col)
        if self.accept("["):
            idx = self.expect(kind="int")
            if int(idx.text) >= self.cregs[tok.text]:
                raise QasmError("classical bit index out of range", idx.line, idx.col)
            self.expect("]")
        self.expect(";")
        del src  # readout is implicit at the end of the circuit

    def param_list(self):
        nodes = []
        if self.accept("("):
            if not self.accept(")"):
                nodes.append(self.expr())
                while self.accept(","):
                    nodes.append(self.expr())
                self.expect(")")
        return nodes

    def argument(self):
        tok = self.expect(kind="id")
        if self.qreg is None or tok.text != self.qreg[0]:
            raise QasmError(f"unknown quantum register {tok.text!r}", tok.line, tok.col)
        if self.accept("["):
            idx = self.expect(kind="int")
            self.expect("]")
            q = int(idx.text)
            if q >= self.qreg[1]:
                raise QasmError(f"qubit index {q} out of range for {tok.text}[{self.qreg[1]}]",
                                idx.line, idx.col)
            return [q]
        return list(range(self.qreg[1]))

    def arg_list(self):
        args = [self.argument()]
        while self.accept(","):
            args.append(self.argument())
        return args

    def gate_call(self):
        tok = self.next()
        pnodes = self.param_list()
        args = self.arg_list()
        self.expect(";")
        params = [_eval(n, {"pi": math.pi}) for n in pnodes]
        width = max(len(a) for a in args)
        for a in args:
            if len(a) not in (1, width):
                raise QasmError("register arguments have mismatched sizes", tok.line, tok.col)
        for k in range(width):
            qubits = [a[0] if len(a) == 1 else a[k] for a in args]
            if len(set(qubits)) != len(qubits):
                raise QasmError(f"repeated qubit in {tok.text}", tok.line, tok.col)
            self.apply(tok.text, params, qubits, tok, depth=0)

    def apply(self, name, params, qubits, tok, depth):
        if depth > 64:
            raise QasmError(f"gate definition of {name!r} recurses too deeply", tok.line, tok.col)
        if name in self.defs:
            d = self.defs[name]
            if len(params) != len(d.params) or len(qubits) != len(d.args):
                raise QasmError(f"wrong number of arguments for {name!r}", tok.line, tok.col)
            env = dict(zip(d.params, params))
            env["pi"] = math.pi
            binding = dict(zip(d.args, qubits))
            for sub, pnodes, names, line, col in d.body:
                vals = [_eval(n, env) for n in pnodes]
                self.apply(sub, vals, [binding[n] for n in names], _Tok("id", sub, line, col), depth + 1)
            return
        if name not in _BUILTINS:
            raise QasmError(f"unsupported gate {name!r}", tok.line, tok.col)
        n_params, n_qubits, expand = _BUILTINS[name]
        if len(params) != n_params or len(qubits) != n_qubits:
            raise QasmError(f"{name} takes {n_params} parameters and {n_qubits} qubits",
                            tok.line, tok.col)
        for kind, local, angles in expand(params):
            if any(not math.isfinite(a) for a in angles):
                raise QasmError(f"non-finite angle in {name}", tok.line, tok.col)
            self.ops.append((kind, tuple(qubits[j] for j in local), tuple(angles), tok.line))

    # expression grammar: sum -> product -> power -> unary -> atom
    def expr(self):
        node = self.term()
        while self.peek().text in ("+", "-"):
            op = self.next().text
            node = ("bin", op, node, self.term())
        return node

    def term(self):
        node = self.power()
        while self.peek().text in ("*", "/"):
            op = self.next().text
            node = ("bin", op, node, self.power())
        return node

    def power(self):
        base = self.unary()
        if self.accept("^"):
            return ("bin", "^", base, self.power())
        return base

    def unary(self):
        if self.accept("-"):
            return ("neg", self.unary())
        if self.accept("+"):
            return self.unary()
        return self.atom()

    def atom(self):
        tok = self.next()
        if tok.kind in ("int", "real"):
            return ("num", float(tok.text))
        if tok.text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "id":
            if tok.text in _FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return ("call", tok.text, arg)
            return ("var", tok.text, tok.line, tok.col)
        raise QasmError(f"unexpected token {tok.text!r} in expression", tok.line, tok.col)


def parse_qasm(text):
    """Parse OpenQASM 2.0 source into a native-gate :class:`Circuit`."""
    n, ops = _Parser(text).parse()
    gates = [Gate(i, kind, qubits, params, line) for i, (kind, qubits, params, line) in enumerate(ops)]
    return Circuit(n, tuple(gates))


def load_qasm(path):
    with open(path, encoding="utf-8") as fh:
        return parse_qasm(fh.read())


# ----------------------------------------------------------------- dump format

def dump_circuit(circuit):
    """Canonical one-gate-per-line text form (angles to 12 significant digits)."""
    lines = [f"QUBITS {circuit.num_qubits}"]
    for g in circuit.gates:
        if g.kind == U3:
            angles = " ".join(format(a, ".12g") for a in g.params)
            lines.append(f"U3 q{g.qubits[0]} {angles}")
        else:
            lines.append(f"CZ q{g.qubits[0]} q{g.qubits[1]}")
    return "\n".join(lines) + "\n"


def parse_dump(text):
    """Inverse of :func:`dump_circuit`."""
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0][0] != "QUBITS" or len(lines[0]) != 2:
        raise QasmError("dump must start with 'QUBITS <n>'", 1, 1)
    n = int(lines[0][1])
    ops = []
    for lineno, parts in enumerate(lines[1:], start=2):
        try:
            if parts[0] == "U3" and len(parts) == 5:
                ops.append((U3, (int(parts[1][1:]),), tuple(float(p) for p in parts[2:])))
            elif parts[0] == "CZ" and len(parts) == 3:
                ops.append((CZ, (int(parts[1][1:]), int(parts[2][1:])), ()))
            else:
                raise ValueError
        except ValueError:
            raise QasmError(f"malformed dump line {' '.join(parts)!r}", lineno, 1) from None
    return Circuit.from_ops(n, ops)
