"""Line-based circuit file format.

One statement per line, `#` starts a comment, whitespace separates tokens:

    qubits N
    h|x|y|z|s|t Q
    rx|ry|rz|r1 ANGLE Q
    cx|cz QC QT
    cr1 ANGLE QC QT
    swap Q1 Q2
    measure Q -> CB
    cif CB GATE...
    assert_classical Q... [expect=BITS] [alpha=A] [shots=S] [verdict=pass|fail]
    assert_uniform Q... [alpha=A] [shots=S] [verdict=pass|fail]
    assert_product [Q...] [Q...] [alpha=A] [shots=S] [resamples=R] [verdict=pass|fail]

Angles are decimal radians. The `qubits` declaration must come first.
`cif CB` applies the rest of the line only when classical bit CB is 1.
"""

from __future__ import annotations

import re

from .assertions import AssertionDirective, AssertionKind
from .errors import ParseError
from .sim import (
    CONTROLLED_GATES,
    Circuit,
    FIXED_GATES,
    GateOp,
    Measurement,
    QUBIT_CAP,
    ROTATION_GATES,
)

_TOKEN = re.compile(r"\S+")

_ASSERT_KINDS = {
    "assert_classical": AssertionKind.CLASSICAL,
    "assert_uniform": AssertionKind.UNIFORM,
    "assert_product": AssertionKind.PRODUCT,
}


class _Statement:
    """Tokens of one source line with 1-based column positions."""

    def __init__(self, line_no: int, tokens: list[tuple[str, int]]):
        self.line_no = line_no
        self.tokens = tokens

    def error(self, message: str, pos: int | None = None) -> ParseError:
        if pos is None or pos >= len(self.tokens):
            column = self.tokens[-1][1] + len(self.tokens[-1][0]) if self.tokens else 1
        else:
            column = self.tokens[pos][1]
        return ParseError(message, self.line_no, column)


def _tokenize(text: str) -> list[_Statement]:
    statements = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(line)]
        if tokens:
            statements.append(_Statement(line_no, tokens))
    return statements


class _Parser:
    def __init__(self):
        self.n_qubits = 0
        self.items: list = []
        self.written_cbits: set[int] = set()
        self.max_cbit = -1

    def parse_int(self, stmt: _Statement, pos: int, what: str) -> int:
        token = stmt.tokens[pos][0]
        try:
            return int(token)
        except ValueError:
            raise stmt.error(f"expected {what}, got {token!r}", pos) from None

    def parse_qubit(self, stmt: _Statement, pos: int) -> int:
        q = self.parse_int(stmt, pos, "a qubit index")
        if not 0 <= q < self.n_qubits:
            raise stmt.error(
                f"qubit index {q} out of range (circuit has {self.n_qubits})", pos)
        return q

    def parse_angle(self, stmt: _Statement, pos: int) -> float:
        token = stmt.tokens[pos][0]
        try:
            return float(token)
        except ValueError:
            raise stmt.error(f"expected an angle in radians, got {token!r}", pos) from None

    def expect_arity(self, stmt: _Statement, tokens: list[tuple[str, int]],
                     count: int, usage: str) -> None:
        if len(tokens) - 1 != count:
            raise stmt.error(
                f"{tokens[0][0]!r} takes {count} argument(s): {usage}",
                1 if len(tokens) > 1 else 0)

    def parse_gate(self, stmt: _Statement, tokens: list[tuple[str, int]],
                   offset: int, condition: int | None) -> GateOp:
        """Parse a gate statement from `tokens` (a suffix of stmt.tokens)."""

        def qubit(pos: int) -> int:
            return self.parse_qubit(stmt, offset + pos)

        kind = tokens[0][0]
        if kind in FIXED_GATES or kind in {"rx", "ry", "rz", "r1"}:
            if kind in FIXED_GATES:
                self.expect_arity(stmt, tokens, 1, f"{kind} Q")
                angle = None
                qpos = 1
            else:
                self.expect_arity(stmt, tokens, 2, f"{kind} ANGLE Q")
                angle = self.parse_angle(stmt, offset + 1)
                qpos = 2
            return GateOp(kind, targets=(qubit(qpos),), angle=angle,
                          classical_condition=condition)
        if kind in {"cx", "cz"}:
            self.expect_arity(stmt, tokens, 2, f"{kind} QC QT")
            control, target = qubit(1), qubit(2)
            if control == target:
                raise stmt.error("control and target must differ", offset + 2)
            return GateOp(kind, targets=(target,), controls=(control,),
                          classical_condition=condition)
        if kind == "cr1":
            self.expect_arity(stmt, tokens, 3, "cr1 ANGLE QC QT")
            angle = self.parse_angle(stmt, offset + 1)
            control, target = qubit(2), qubit(3)
            if control == target:
                raise stmt.error("control and target must differ", offset + 3)
            return GateOp(kind, targets=(target,), controls=(control,), angle=angle,
                          classical_condition=condition)
        if kind == "swap":
            self.expect_arity(stmt, tokens, 2, "swap Q1 Q2")
            q1, q2 = qubit(1), qubit(2)
            if q1 == q2:
                raise stmt.error("swap qubits must differ", offset + 2)
            return GateOp(kind, targets=(q1, q2), classical_condition=condition)
        raise stmt.error(f"unknown gate {kind!r}", offset)

    def parse_options(self, stmt: _Statement, start: int, kind: AssertionKind) -> dict:
        allowed = {"alpha", "shots", "verdict"}
        if kind == AssertionKind.CLASSICAL:
            allowed.add("expect")
        if kind == AssertionKind.PRODUCT:
            allowed.add("resamples")
        options: dict = {}
        for pos in range(start, len(stmt.tokens)):
            token = stmt.tokens[pos][0]
            if "=" not in token:
                raise stmt.error(f"expected KEY=VALUE option, got {token!r}", pos)
            key, _, value = token.partition("=")
            if key not in allowed:
                raise stmt.error(f"unknown option {key!r} for {kind.value.lower()} "
                                 f"assertion", pos)
            if key in options:
                raise stmt.error(f"duplicate option {key!r}", pos)
            if key == "alpha":
                try:
                    options["alpha"] = float(value)
                except ValueError:
                    raise stmt.error(f"alpha must be a number, got {value!r}", pos) from None
                if not 0.0 < options["alpha"] < 1.0:
                    raise stmt.error(f"alpha must be in (0, 1), got {value}", pos)
            elif key in {"shots", "resamples"}:
                try:
                    options[key] = int(value)
                except ValueError:
                    raise stmt.error(f"{key} must be an integer, got {value!r}", pos) from None
                if options[key] < 1:
                    raise stmt.error(f"{key} must be >= 1, got {value}", pos)
            elif key == "expect":
                options["expect"] = value
            elif key == "verdict":
                if value not in {"pass", "fail"}:
                    raise stmt.error(f"verdict must be 'pass' or 'fail', got {value!r}", pos)
                options["verdict"] = value == "pass"
        return options

    def parse_group(self, stmt: _Statement, pos: int) -> tuple[tuple[int, ...], int]:
        """Parse a bracketed qubit group like `[0 1 2]` starting at token pos."""
        if pos >= len(stmt.tokens) or not stmt.tokens[pos][0].startswith("["):
            raise stmt.error("expected a bracketed qubit group like [0 1]", pos)
        parts: list[str] = []
        end = pos
        closed = False
        while end < len(stmt.tokens):
            token = stmt.tokens[end][0]
            if end == pos:
                token = token[1:]
            if token.endswith("]"):
                token = token[:-1]
                closed = True
            if token:
                parts.append(token)
            end += 1
            if closed:
                break
        if not closed:
            raise stmt.error("unterminated qubit group (missing ']')", pos)
        if not parts:
            raise stmt.error("qubit group must not be empty", pos)
        qubits = []
        for part in parts:
            try:
                q = int(part)
            except ValueError:
                raise stmt.error(f"expected a qubit index, got {part!r}", pos) from None
            if not 0 <= q < self.n_qubits:
                raise stmt.error(
                    f"qubit index {q} out of range (circuit has {self.n_qubits})", pos)
            qubits.append(q)
        return tuple(qubits), end

    def parse_assertion(self, stmt: _Statement) -> AssertionDirective:
        kind = _ASSERT_KINDS[stmt.tokens[0][0]]
        if kind == AssertionKind.PRODUCT:
            group0, after0 = self.parse_group(stmt, 1)
            group1, after1 = self.parse_group(stmt, after0)
            options = self.parse_options(stmt, after1, kind)
            if set(group0) & set(group1):
                raise stmt.error(
                    f"product groups overlap: {sorted(set(group0) & set(group1))}", 1)
            try:
                return AssertionDirective(
                    kind, group0=group0, group1=group1,
                    alpha=options.get("alpha"), shots=options.get("shots"),
                    resamples=options.get("resamples"),
                    expected_verdict=options.get("verdict"))
            except ValueError as exc:
                raise stmt.error(str(exc), 0) from None
        qubits = []
        pos = 1
        while pos < len(stmt.tokens) and "=" not in stmt.tokens[pos][0]:
            qubits.append(self.parse_qubit(stmt, pos))
            pos += 1
        if not qubits:
            raise stmt.error("assertion needs at least one qubit index", pos)
        options = self.parse_options(stmt, pos, kind)
        try:
            return AssertionDirective(
                kind, qubits=tuple(qubits), alpha=options.get("alpha"),
                shots=options.get("shots"),
                expected_bitstring=options.get("expect"),
                expected_verdict=options.get("verdict"))
        except ValueError as exc:
            raise stmt.error(str(exc), 0) from None

    def parse_statement(self, stmt: _Statement) -> None:
        head = stmt.tokens[0][0]
        if head == "qubits":
            raise stmt.error("duplicate 'qubits' declaration", 0)
        if head == "measure":
            if (len(stmt.tokens) != 4 or stmt.tokens[2][0] != "->"):
                raise stmt.error("usage: measure Q -> CB", 0)
            q = self.parse_qubit(stmt, 1)
            cbit = self.parse_int(stmt, 3, "a classical bit index")
            if cbit < 0:
                raise stmt.error(f"classical bit index must be >= 0, got {cbit}", 3)
            self.items.append(Measurement(q, cbit))
            self.written_cbits.add(cbit)
            self.max_cbit = max(self.max_cbit, cbit)
            return
        if head == "cif":
            if len(stmt.tokens) < 3:
                raise stmt.error("usage: cif CB GATE...", 0)
            cbit = self.parse_int(stmt, 1, "a classical bit index")
            if cbit not in self.written_cbits:
                raise stmt.error(
                    f"classical bit {cbit} is read before any measurement writes it", 1)
            gate = self.parse_gate(stmt, stmt.tokens[2:], 2, condition=cbit)
            self.items.append(gate)
            return
        if head in _ASSERT_KINDS:
            self.items.append(self.parse_assertion(stmt))
            return
        self.items.append(self.parse_gate(stmt, stmt.tokens, 0, condition=None))

    def run(self, text: str) -> Circuit:
        statements = _tokenize(text)
        if not statements:
            raise ParseError("empty circuit file (expected 'qubits N')", 1)
        first = statements[0]
        if first.tokens[0][0] != "qubits":
            raise first.error("circuit file must start with 'qubits N'", 0)
        if len(first.tokens) != 2:
            raise first.error("usage: qubits N", 0)
        n = self.parse_int(first, 1, "a qubit count")
        if not 0 < n <= QUBIT_CAP:
            raise first.error(f"qubit count must be in 1..{QUBIT_CAP}, got {n}", 1)
        self.n_qubits = n
        for stmt in statements[1:]:
            self.parse_statement(stmt)
        circuit = Circuit(self.n_qubits, self.max_cbit + 1, self.items)
        circuit.validate()
        return circuit


def parse_circuit(text: str) -> Circuit:
    """Parse circuit-file text into a validated Circuit."""
    return _Parser().run(text)


def _format_options(directive: AssertionDirective) -> str:
    parts = []
    if directive.expected_bitstring is not None:
        parts.append(f"expect={directive.expected_bitstring}")
    if directive.alpha is not None:
        parts.append(f"alpha={directive.alpha!r}")
    if directive.shots is not None:
        parts.append(f"shots={directive.shots}")
    if directive.resamples is not None:
        parts.append(f"resamples={directive.resamples}")
    if directive.expected_verdict is not None:
        parts.append(f"verdict={'pass' if directive.expected_verdict else 'fail'}")
    return (" " + " ".join(parts)) if parts else ""


def render_circuit(circuit: Circuit) -> str:
    """Canonical circuit-file text; parse(render(c)) == c."""
    lines = [f"qubits {circuit.n_qubits}"]
    for item in circuit.items:
        if isinstance(item, Measurement):
            lines.append(f"measure {item.qubit} -> {item.cbit}")
        elif isinstance(item, AssertionDirective):
            if item.kind == AssertionKind.PRODUCT:
                g0 = " ".join(str(q) for q in item.group0)
                g1 = " ".join(str(q) for q in item.group1)
                lines.append(f"assert_product [{g0}] [{g1}]{_format_options(item)}")
            else:
                name = ("assert_classical" if item.kind == AssertionKind.CLASSICAL
                        else "assert_uniform")
                qs = " ".join(str(q) for q in item.qubits)
                lines.append(f"{name} {qs}{_format_options(item)}")
        else:
            prefix = f"cif {item.classical_condition} " \
                if item.classical_condition is not None else ""
            kind = item.kind
            if kind in CONTROLLED_GATES:
                args = f"{item.controls[0]} {item.targets[0]}"
            else:
                args = " ".join(str(q) for q in item.targets)
            if kind in ROTATION_GATES or kind == "cr1":
                lines.append(f"{prefix}{kind} {item.angle!r} {args}")
            else:
                lines.append(f"{prefix}{kind} {args}")
    return "\n".join(lines) + "\n"
