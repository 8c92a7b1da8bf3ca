"""OpenQASM 2.0 subset parser producing elemental one/two-qubit circuits.

Supported: the standard header, qreg/creg declarations, the qelib1-style
gate set (u1/u2/u3/u/p/rx/ry/rz/x/y/z/h/s/sdg/t/tdg/sx/cx/cz/swap/ccx),
user gate-definition blocks expandable to those, barriers, register
broadcasting, and terminal measurements. ccx is expanded to the standard
six-CX network; swap stays a single two-qubit gate; barriers and terminal
measurements are dropped (fidelities are computed pre-measurement).

Rejected with UnsupportedFeatureError: mid-circuit measurement (any quantum
operation after a measure), classical control (`if`), reset, and opaque
declarations. See docs/qasm_subset.md for the exact grammar.

Register order maps onto the simulator convention directly: the first
declared qubit is qubit 0, the most significant amplitude index position.
"""

import math
import re
from dataclasses import dataclass

import numpy as np

from . import gates
from .circuit import Circuit, Gate
from .errors import QasmError, UnsupportedFeatureError

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>[ \t\r]+)
    | (?P<comment>//[^\n]*)
    | (?P<newline>\n)
    | (?P<real>(\d+\.\d*|\.\d+)([eE][-+]?\d+)?|\d+[eE][-+]?\d+)
    | (?P<int>\d+)
    | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<string>"[^"\n]*")
    | (?P<arrow>->)
    | (?P<sym>==|[{}()\[\];,+\-*/^])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise QasmError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind == "newline":
            line += 1
            col = 1
        elif kind not in ("ws", "comment"):
            tokens.append(_Token(kind, tok, line, col))
            col += len(tok)
        else:
            col += len(tok)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


# One- and two-qubit builtins: name -> (num_params, num_qubits, matrix factory).
_BUILTIN = {
    "u3": (3, 1, gates.u3),
    "u": (3, 1, gates.u3),
    "u2": (2, 1, gates.u2),
    "u1": (1, 1, gates.phase),
    "p": (1, 1, gates.phase),
    "rx": (1, 1, gates.rx),
    "ry": (1, 1, gates.ry),
    "rz": (1, 1, gates.rz),
    "x": (0, 1, lambda: gates.X),
    "y": (0, 1, lambda: gates.Y),
    "z": (0, 1, lambda: gates.Z),
    "h": (0, 1, lambda: gates.H),
    "s": (0, 1, lambda: gates.S),
    "sdg": (0, 1, lambda: gates.SDG),
    "t": (0, 1, lambda: gates.T),
    "tdg": (0, 1, lambda: gates.TDG),
    "sx": (0, 1, lambda: gates.SX),
    "id": (0, 1, lambda: gates.I2),
    "cx": (0, 2, lambda: gates.CX),
    "cz": (0, 2, lambda: gates.CZ),
    "swap": (0, 2, lambda: gates.SWAP),
}

# Standard six-CX Toffoli network; exact, not merely up to phase.
_CCX_BODY = [
    ("h", [2]), ("cx", [1, 2]), ("tdg", [2]), ("cx", [0, 2]), ("t", [2]),
    ("cx", [1, 2]), ("tdg", [2]), ("cx", [0, 2]), ("t", [1]), ("t", [2]),
    ("h", [2]), ("cx", [0, 1]), ("t", [0]), ("tdg", [1]), ("cx", [0, 1]),
]

_FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "exp": math.exp,
    "ln": math.log,
    "sqrt": math.sqrt,
}


@dataclass
class _GateDef:
    name: str
    params: list[str]
    qubits: list[str]
    body: list  # list of (name, param_exprs, qubit_formals, token)


class _Parser:
    def __init__(self, text: str, source: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.source = source
        self.qregs: dict[str, tuple[int, int]] = {}  # name -> (offset, size)
        self.cregs: dict[str, int] = {}
        self.num_qubits = 0
        self.gatedefs: dict[str, _GateDef] = {}
        self.out: list[Gate] = []
        self.measured = False
        self.measure_count = 0

    # -- token helpers --

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> _Token:
        tok = self.next()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text if text is not None else kind
            raise QasmError(f"expected {want!r}, found {tok.text!r}", tok.line, tok.column)
        return tok

    def accept(self, kind: str, text: str | None = None) -> _Token | None:
        tok = self.peek()
        if tok.kind == kind and (text is None or tok.text == text):
            return self.next()
        return None

    # -- grammar --

    def parse(self) -> Circuit:
        tok = self.expect("id", "OPENQASM")
        version = self.next()
        if version.text not in ("2.0", "2"):
            raise UnsupportedFeatureError(
                f"only OpenQASM 2.0 is supported, found {version.text!r}",
                version.line, version.column,
            )
        self.expect("sym", ";")
        while self.peek().kind != "eof":
            self.statement()
        if self.num_qubits == 0:
            raise QasmError("no qreg declared", tok.line, tok.column)
        circ = Circuit(self.num_qubits, metadata={"source": self.source})
        circ.metadata["measured"] = self.measure_count
        for g in self.out:
            circ.append(g)
        return circ

    def statement(self) -> None:
        tok = self.peek()
        if tok.kind != "id":
            raise QasmError(f"unexpected token {tok.text!r}", tok.line, tok.column)
        name = tok.text
        if name == "include":
            self.next()
            self.expect("string")
            self.expect("sym", ";")
        elif name in ("qreg", "creg"):
            self.next()
            reg = self.expect("id")
            self.expect("sym", "[")
            size = int(self.expect("int").text)
            self.expect("sym", "]")
            self.expect("sym", ";")
            if reg.text in self.qregs or reg.text in self.cregs:
                raise QasmError(f"register {reg.text!r} already declared", reg.line, reg.column)
            if name == "qreg":
                self.qregs[reg.text] = (self.num_qubits, size)
                self.num_qubits += size
            else:
                self.cregs[reg.text] = size
        elif name == "gate":
            self.gate_definition()
        elif name == "barrier":
            self.next()
            self.argument_list()
            self.expect("sym", ";")
        elif name == "measure":
            self.measure_statement()
        elif name == "reset":
            raise UnsupportedFeatureError("reset is not supported", tok.line, tok.column)
        elif name == "if":
            raise UnsupportedFeatureError(
                "classical control (`if`) is not supported", tok.line, tok.column
            )
        elif name == "opaque":
            raise UnsupportedFeatureError("opaque gates are not supported", tok.line, tok.column)
        else:
            self.gate_call()

    def gate_definition(self) -> None:
        self.expect("id", "gate")
        name = self.expect("id")
        if name.text in _BUILTIN or name.text == "ccx" or name.text in self.gatedefs:
            raise QasmError(f"gate {name.text!r} already defined", name.line, name.column)
        params: list[str] = []
        if self.accept("sym", "("):
            if not self.accept("sym", ")"):
                params.append(self.expect("id").text)
                while self.accept("sym", ","):
                    params.append(self.expect("id").text)
                self.expect("sym", ")")
        qubits = [self.expect("id").text]
        while self.accept("sym", ","):
            qubits.append(self.expect("id").text)
        self.expect("sym", "{")
        body = []
        while not self.accept("sym", "}"):
            tok = self.peek()
            if tok.kind == "id" and tok.text == "barrier":
                self.next()
                while not self.accept("sym", ";"):
                    self.next()
                continue
            body.append(self.gate_call_in_def(params, qubits))
        self.gatedefs[name.text] = _GateDef(name.text, params, qubits, body)

    def gate_call_in_def(self, formals_p: list[str], formals_q: list[str]):
        name = self.expect("id")
        param_exprs = []
        if self.accept("sym", "("):
            if not self.accept("sym", ")"):
                param_exprs.append(self.expression())
                while self.accept("sym", ","):
                    param_exprs.append(self.expression())
                self.expect("sym", ")")
        args = [self.expect("id")]
        while self.accept("sym", ","):
            args.append(self.expect("id"))
        self.expect("sym", ";")
        qubit_slots = []
        for a in args:
            if a.text not in formals_q:
                raise QasmError(f"unknown qubit {a.text!r} in gate body", a.line, a.column)
            qubit_slots.append(formals_q.index(a.text))
        return (name.text, param_exprs, qubit_slots, name)

    def measure_statement(self) -> None:
        self.expect("id", "measure")
        src = self.argument()
        self.expect("arrow")
        self.argument()
        self.expect("sym", ";")
        n = 1 if src[1] is not None else self.qregs.get(src[0], (0, 1))[1]
        self.measure_count += n
        self.measured = True

    def argument(self) -> tuple[str, int | None]:
        reg = self.expect("id")
        idx = None
        if self.accept("sym", "["):
            idx = int(self.expect("int").text)
            self.expect("sym", "]")
        return (reg.text, idx, reg)

    def argument_list(self) -> list:
        args = [self.argument()]
        while self.accept("sym", ","):
            args.append(self.argument())
        return args

    def gate_call(self) -> None:
        name = self.next()
        if self.measured:
            raise UnsupportedFeatureError(
                f"quantum operation {name.text!r} after measurement "
                "(mid-circuit measurement is not supported)",
                name.line, name.column,
            )
        params = []
        if self.accept("sym", "("):
            if not self.accept("sym", ")"):
                params.append(self.eval_expression(self.expression(), {}))
                while self.accept("sym", ","):
                    params.append(self.eval_expression(self.expression(), {}))
                self.expect("sym", ")")
        args = self.argument_list()
        self.expect("sym", ";")
        applications = self.broadcast(args, name)
        for qubits in applications:
            self.emit(name.text, params, qubits, name)

    def broadcast(self, args, tok: _Token) -> list[list[int]]:
        """Resolve register arguments, expanding whole-register references
        elementwise (all whole registers in one call must have equal size).
        """
        resolved = []
        for reg, idx, rtok in args:
            if reg not in self.qregs:
                raise QasmError(f"unknown quantum register {reg!r}", rtok.line, rtok.column)
            offset, size = self.qregs[reg]
            if idx is None:
                resolved.append(list(range(offset, offset + size)))
            else:
                if not 0 <= idx < size:
                    raise QasmError(
                        f"index {idx} out of range for {reg}[{size}]", rtok.line, rtok.column
                    )
                resolved.append([offset + idx])
        widths = {len(r) for r in resolved if len(r) > 1}
        if len(widths) > 1:
            raise QasmError("mismatched register sizes in broadcast", tok.line, tok.column)
        width = widths.pop() if widths else 1
        out = []
        for k in range(width):
            qubits = [r[k] if len(r) > 1 else r[0] for r in resolved]
            if len(set(qubits)) != len(qubits):
                raise QasmError("repeated qubit in gate operands", tok.line, tok.column)
            out.append(qubits)
        return out

    def emit(self, name: str, params: list[float], qubits: list[int], tok: _Token) -> None:
        """Expand one gate application into elemental Gate objects."""
        if name == "ccx":
            if params or len(qubits) != 3:
                raise QasmError("ccx takes no parameters and 3 qubits", tok.line, tok.column)
            for sub, slots in _CCX_BODY:
                self.emit(sub, [], [qubits[i] for i in slots], tok)
            return
        if name in _BUILTIN:
            n_par, n_qub, factory = _BUILTIN[name]
            if len(params) != n_par:
                raise QasmError(
                    f"gate {name!r} takes {n_par} parameter(s), got {len(params)}",
                    tok.line, tok.column,
                )
            if len(qubits) != n_qub:
                raise QasmError(
                    f"gate {name!r} acts on {n_qub} qubit(s), got {len(qubits)}",
                    tok.line, tok.column,
                )
            matrix = factory(*params)
            self.out.append(Gate(matrix, tuple(qubits), label=name))
            return
        if name in self.gatedefs:
            gd = self.gatedefs[name]
            if len(params) != len(gd.params):
                raise QasmError(
                    f"gate {name!r} takes {len(gd.params)} parameter(s), got {len(params)}",
                    tok.line, tok.column,
                )
            if len(qubits) != len(gd.qubits):
                raise QasmError(
                    f"gate {name!r} acts on {len(gd.qubits)} qubit(s), got {len(qubits)}",
                    tok.line, tok.column,
                )
            env = dict(zip(gd.params, params))
            for sub, exprs, slots, subtok in gd.body:
                values = [self.eval_expression(e, env) for e in exprs]
                self.emit(sub, values, [qubits[i] for i in slots], subtok)
            return
        raise QasmError(f"unknown gate {name!r}", tok.line, tok.column)

    # -- parameter expressions --

    def expression(self):
        node = self.term()
        while True:
            tok = self.peek()
            if tok.kind == "sym" and tok.text in "+-":
                self.next()
                node = ("binop", tok.text, node, self.term())
            else:
                return node

    def term(self):
        node = self.power()
        while True:
            tok = self.peek()
            if tok.kind == "sym" and tok.text in "*/":
                self.next()
                node = ("binop", tok.text, node, self.power())
            else:
                return node

    def power(self):
        node = self.unary()
        if self.accept("sym", "^"):
            return ("binop", "^", node, self.power())
        return node

    def unary(self):
        if self.accept("sym", "-"):
            return ("neg", self.unary())
        if self.accept("sym", "+"):
            return self.unary()
        tok = self.next()
        if tok.kind in ("real", "int"):
            return ("num", float(tok.text))
        if tok.kind == "id":
            if tok.text == "pi":
                return ("num", math.pi)
            if tok.text in _FUNCTIONS:
                self.expect("sym", "(")
                arg = self.expression()
                self.expect("sym", ")")
                return ("call", tok.text, arg)
            return ("id", tok.text, tok)
        if tok.kind == "sym" and tok.text == "(":
            node = self.expression()
            self.expect("sym", ")")
            return node
        raise QasmError(f"bad expression near {tok.text!r}", tok.line, tok.column)

    def eval_expression(self, node, env: dict[str, float]) -> float:
        kind = node[0]
        if kind == "num":
            return node[1]
        if kind == "id":
            name, tok = node[1], node[2]
            if name not in env:
                raise QasmError(f"unknown parameter {name!r}", tok.line, tok.column)
            return env[name]
        if kind == "neg":
            return -self.eval_expression(node[1], env)
        if kind == "call":
            return _FUNCTIONS[node[1]](self.eval_expression(node[2], env))
        op, lhs, rhs = node[1], node[2], node[3]
        a, b = self.eval_expression(lhs, env), self.eval_expression(rhs, env)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            return a / b
        return a**b


def parse_qasm(text: str, source: str = "<string>") -> Circuit:
    """Parse OpenQASM 2.0 source text into an elemental-gate Circuit."""
    return _Parser(text, source).parse()


def parse_qasm_file(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse_qasm(fh.read(), source=str(path))
