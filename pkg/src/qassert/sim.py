"""Dense state-vector simulation with mid-circuit measurement.

Basis convention: basis index b encodes qubit i as bit (n_qubits - 1 - i),
so qubit 0 is the most significant bit and the leftmost character of a
formatted bitstring. Preparing |q0=1, q1=0> therefore reads "10".
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, CircuitError, NumericalError

QUBIT_CAP = 20

FIXED_GATES = frozenset({"h", "x", "y", "z", "s", "t"})
ROTATION_GATES = frozenset({"rx", "ry", "rz", "r1"})
CONTROLLED_GATES = frozenset({"cx", "cz", "cr1"})
GATE_KINDS = FIXED_GATES | ROTATION_GATES | CONTROLLED_GATES | {"swap"}
PARAMETERIZED = frozenset({"rx", "ry", "rz", "r1", "cr1"})

_SQRT1_2 = 1.0 / np.sqrt(2.0)
_FIXED_MATRICES = {
    "h": np.array([[1, 1], [1, -1]], dtype=np.complex128) * _SQRT1_2,
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    "s": np.array([[1, 0], [0, 1j]], dtype=np.complex128),
    "t": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=np.complex128),
}


def _rotation_matrix(kind: str, angle: float) -> np.ndarray:
    half = angle / 2.0
    c, s = np.cos(half), np.sin(half)
    if kind == "rx":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind == "ry":
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if kind == "rz":
        return np.array([[np.exp(-1j * half), 0], [0, np.exp(1j * half)]],
                        dtype=np.complex128)
    if kind == "r1":
        return np.array([[1, 0], [0, np.exp(1j * angle)]], dtype=np.complex128)
    raise ValueError(f"not a rotation gate: {kind!r}")


@dataclass(frozen=True)
class GateOp:
    """One gate application: kind, qubits, optional angle and classical guard.

    Controlled kinds (cx, cz, cr1) carry their control in `controls` and the
    acted-on qubit in `targets`. A gate with `classical_condition` set is
    applied only when that classical bit holds 1 at execution time.
    """

    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    angle: float | None = None
    classical_condition: int | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if (self.angle is not None) != (self.kind in PARAMETERIZED):
            raise ValueError(f"gate {self.kind!r}: angle present iff parameterized")
        qubits = self.targets + self.controls
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"gate {self.kind!r}: qubit indices must be distinct")

    def qubits(self) -> tuple[int, ...]:
        return self.targets + self.controls


@dataclass(frozen=True)
class Measurement:
    """Mid-circuit projective measurement of one qubit into a classical bit."""

    qubit: int
    cbit: int


@dataclass
class Circuit:
    """Ordered gate/measurement/assertion-directive program on n_qubits."""

    n_qubits: int
    n_classical_bits: int = 0
    items: list = field(default_factory=list)

    def __eq__(self, other):
        if not isinstance(other, Circuit):
            return NotImplemented
        return (self.n_qubits == other.n_qubits
                and self.n_classical_bits == other.n_classical_bits
                and self.items == other.items)

    def validate(self) -> None:
        """Check structural invariants; raises CircuitError on violation."""
        from .assertions import AssertionDirective

        if not 0 < self.n_qubits <= QUBIT_CAP:
            raise CircuitError(f"n_qubits must be in 1..{QUBIT_CAP}, got {self.n_qubits}")
        written: set[int] = set()
        for pos, item in enumerate(self.items):
            if isinstance(item, GateOp):
                for q in item.qubits():
                    if not 0 <= q < self.n_qubits:
                        raise CircuitError(f"item {pos}: qubit index {q} out of range")
                cond = item.classical_condition
                if cond is not None:
                    if not 0 <= cond < self.n_classical_bits:
                        raise CircuitError(f"item {pos}: classical bit {cond} out of range")
                    if cond not in written:
                        raise CircuitError(
                            f"item {pos}: conditional gate reads classical bit {cond} "
                            "before any measurement writes it")
            elif isinstance(item, Measurement):
                if not 0 <= item.qubit < self.n_qubits:
                    raise CircuitError(f"item {pos}: measured qubit {item.qubit} out of range")
                if not 0 <= item.cbit < self.n_classical_bits:
                    raise CircuitError(f"item {pos}: classical bit {item.cbit} out of range")
                written.add(item.cbit)
            elif isinstance(item, AssertionDirective):
                for q in item.all_qubits():
                    if not 0 <= q < self.n_qubits:
                        raise CircuitError(f"item {pos}: assertion qubit {q} out of range")
            else:
                raise CircuitError(f"item {pos}: unsupported item {item!r}")


@dataclass(eq=False)
class StateVector:
    """Complex amplitudes over the 2^n_qubits computational basis."""

    n_qubits: int
    amplitudes: np.ndarray

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def new_state(n_qubits: int) -> StateVector:
    """The all-zeros state |0...0>."""
    if not 0 < n_qubits <= QUBIT_CAP:
        raise CapacityError(f"n_qubits must be in 1..{QUBIT_CAP}, got {n_qubits}")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def _check_qubit(state: StateVector, q: int) -> None:
    if not 0 <= q < state.n_qubits:
        raise IndexError(f"qubit index {q} out of range for {state.n_qubits} qubits")


def _apply_single(state: StateVector, matrix: np.ndarray, target: int,
                  controls: tuple[int, ...]) -> None:
    n = state.n_qubits
    tbit = n - 1 - target
    idx = np.arange(state.amplitudes.size)
    mask = (idx >> tbit) & 1 == 0
    for c in controls:
        mask &= (idx >> (n - 1 - c)) & 1 == 1
    i0 = idx[mask]
    i1 = i0 | (1 << tbit)
    a0 = state.amplitudes[i0]
    a1 = state.amplitudes[i1]
    state.amplitudes[i0] = matrix[0, 0] * a0 + matrix[0, 1] * a1
    state.amplitudes[i1] = matrix[1, 0] * a0 + matrix[1, 1] * a1


def _apply_swap(state: StateVector, q1: int, q2: int) -> None:
    n = state.n_qubits
    b1, b2 = n - 1 - q1, n - 1 - q2
    idx = np.arange(state.amplitudes.size)
    sel = ((idx >> b1) & 1 == 1) & ((idx >> b2) & 1 == 0)
    i = idx[sel]
    j = i ^ ((1 << b1) | (1 << b2))
    state.amplitudes[i], state.amplitudes[j] = (state.amplitudes[j],
                                                state.amplitudes[i].copy())


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    """Apply the gate's unitary in place; classical guards are the caller's job."""
    for q in gate.qubits():
        _check_qubit(state, q)
    kind = gate.kind
    if kind == "swap":
        _apply_swap(state, gate.targets[0], gate.targets[1])
    elif kind in FIXED_GATES:
        _apply_single(state, _FIXED_MATRICES[kind], gate.targets[0], gate.controls)
    elif kind in ROTATION_GATES:
        _apply_single(state, _rotation_matrix(kind, gate.angle), gate.targets[0],
                      gate.controls)
    elif kind == "cx":
        _apply_single(state, _FIXED_MATRICES["x"], gate.targets[0], gate.controls)
    elif kind == "cz":
        _apply_single(state, _FIXED_MATRICES["z"], gate.targets[0], gate.controls)
    elif kind == "cr1":
        _apply_single(state, _rotation_matrix("r1", gate.angle), gate.targets[0],
                      gate.controls)
    else:  # unreachable given GateOp validation
        raise ValueError(f"unknown gate kind {kind!r}")
    return state


def outcome_probability(state: StateVector, q: int, bit: int) -> float:
    """Probability that measuring qubit q yields `bit`."""
    _check_qubit(state, q)
    pos = state.n_qubits - 1 - q
    idx = np.arange(state.amplitudes.size)
    sel = (idx >> pos) & 1 == bit
    return float(np.sum(np.abs(state.amplitudes[sel]) ** 2))


def measure_qubit(state: StateVector, q: int,
                  rng: np.random.Generator) -> tuple[int, StateVector]:
    """Projective measurement: sample an outcome, collapse, renormalize."""
    _check_qubit(state, q)
    pos = state.n_qubits - 1 - q
    idx = np.arange(state.amplitudes.size)
    sel1 = (idx >> pos) & 1 == 1
    p1 = float(np.sum(np.abs(state.amplitudes[sel1]) ** 2))
    bit = 1 if rng.random() < p1 else 0
    p = p1 if bit == 1 else 1.0 - p1
    if p <= 0.0:
        raise NumericalError(
            f"measurement of qubit {q} hit a zero-probability branch; "
            "state is not normalized")
    keep = sel1 if bit == 1 else ~sel1
    state.amplitudes[~keep] = 0.0
    state.amplitudes /= np.sqrt(p)
    return bit, state


def run_trajectory(circuit: Circuit, upto: int | None,
                   rng: np.random.Generator) -> tuple[StateVector, list[int]]:
    """Execute one stochastic trajectory of the circuit prefix items[:upto].

    Gates with a classical condition fire only when the referenced bit is 1;
    reading a bit no measurement has written is a circuit-validity error.
    Assertion directives inside the prefix are skipped, not executed.
    """
    from .assertions import AssertionDirective

    items = circuit.items if upto is None else circuit.items[:upto]
    state = new_state(circuit.n_qubits)
    bits = [0] * circuit.n_classical_bits
    written: set[int] = set()
    for item in items:
        if isinstance(item, AssertionDirective):
            continue
        if isinstance(item, Measurement):
            bit, _ = measure_qubit(state, item.qubit, rng)
            bits[item.cbit] = bit
            written.add(item.cbit)
            continue
        cond = item.classical_condition
        if cond is not None:
            if cond not in written:
                raise CircuitError(
                    f"conditional gate reads classical bit {cond} before it is written")
            if bits[cond] != 1:
                continue
        apply_gate(state, item)
    return state, bits


def bitstring(index: int, n_qubits: int) -> str:
    """Format a basis index with qubit 0 as the leftmost character."""
    return format(index, f"0{n_qubits}b")
