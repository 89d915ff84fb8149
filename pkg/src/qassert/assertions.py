"""Statistical assertion checkpoints: classical, uniform, and product state.

Each assertion samples the circuit prefix ending at the checkpoint, reduces
the measurement distribution to the asserted qubits, and runs a hypothesis
test whose null is the asserted state. `passed` is always `p > alpha`: a
small p-value rejects the asserted state, a large one is consistent with it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np

from ._rng import derive_seed
from .errors import InfeasibleShotsError
from .sampling import MeasurementDistribution, marginalize, sample
from .sim import Circuit, bitstring
from .stats import (
    ContingencyTable,
    DEFAULT_RESAMPLES,
    PValue,
    TestMethod,
    chi_square_gof_pvalue,
    chi_square_statistic,
    fisher_exact_2x2,
    legacy_chisq_add1,
    monte_carlo_independence,
    upper_regularized_gamma,
)

if TYPE_CHECKING:
    from .runner import ProgramConfig

DEFAULT_ALPHA = 0.05

# Expected count assigned to each non-target cell by the classical-state
# null ("negligible probability elsewhere" made concrete). Small enough to
# keep the target cell dominant, large enough that the statistic is defined.
CLASSICAL_FLOOR = 0.5


class AssertionKind(str, Enum):
    CLASSICAL = "CLASSICAL"
    UNIFORM = "UNIFORM"
    PRODUCT = "PRODUCT"


@dataclass(frozen=True)
class AssertionDirective:
    """A checkpoint embedded in a circuit's item list.

    CLASSICAL and UNIFORM assert over `qubits`; PRODUCT asserts independence
    between `group0` and `group1`. Fields left as None fall back to run
    configuration defaults. `expected_verdict` records what the circuit's
    author expects the assertion to return, for regression checking.
    """

    kind: AssertionKind
    qubits: tuple[int, ...] = ()
    group0: tuple[int, ...] = ()
    group1: tuple[int, ...] = ()
    alpha: float | None = None
    shots: int | None = None
    resamples: int | None = None
    expected_bitstring: str | None = None
    expected_verdict: bool | None = None

    def __post_init__(self):
        if self.kind == AssertionKind.PRODUCT:
            if not self.group0 or not self.group1:
                raise ValueError("product assertion needs two non-empty qubit groups")
            combined = self.group0 + self.group1
            if len(set(combined)) != len(combined):
                raise ValueError("product assertion groups must be disjoint, "
                                 "with distinct qubits in each")
        else:
            if not self.qubits:
                raise ValueError(f"{self.kind.value} assertion needs at least one qubit")
            if len(set(self.qubits)) != len(self.qubits):
                raise ValueError("assertion qubits must be distinct")
        if self.alpha is not None and not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.shots is not None and self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")
        if self.resamples is not None and self.resamples < 1:
            raise ValueError(f"resamples must be >= 1, got {self.resamples}")
        if self.expected_bitstring is not None:
            if self.kind != AssertionKind.CLASSICAL:
                raise ValueError("expected_bitstring only applies to classical assertions")
            if (len(self.expected_bitstring) != len(self.qubits)
                    or any(ch not in "01" for ch in self.expected_bitstring)):
                raise ValueError(
                    f"expected_bitstring {self.expected_bitstring!r} must be "
                    f"{len(self.qubits)} characters of 0/1")

    def all_qubits(self) -> tuple[int, ...]:
        return self.qubits + self.group0 + self.group1


@dataclass
class AssertionResult:
    """Outcome of one checkpoint evaluation."""

    kind: AssertionKind
    qubits: tuple[int, ...]
    group0: tuple[int, ...] | None
    group1: tuple[int, ...] | None
    alpha: float
    p_value: PValue
    passed: bool
    shots_used: int
    target_bitstring: str | None = None
    table_shape: tuple[int, int] | None = None
    expected_verdict: bool | None = None
    matches_expected: bool | None = None


def default_shots(kind: AssertionKind) -> int:
    """Per-kind shot budget: a single sharp peak needs far fewer shots than
    the statistically subtle uniform/product distributions."""
    if kind == AssertionKind.CLASSICAL:
        return 1000
    return 10000


def build_contingency_table(dist: MeasurementDistribution, group0, group1) -> ContingencyTable:
    """Full 2^|g0| x 2^|g1| cross-tabulation of two qubit groups.

    Cell (i, j) counts outcomes whose group0 substring encodes i and group1
    substring encodes j (leftmost listed qubit = most significant bit).
    All-zero rows and columns are kept.
    """
    g0 = tuple(group0)
    g1 = tuple(group1)
    if not g0 or not g1:
        raise ValueError("both qubit groups must be non-empty")
    if len(set(g0 + g1)) != len(g0 + g1):
        raise ValueError(f"qubit groups must be disjoint with distinct members, "
                         f"got {list(g0)} and {list(g1)}")
    for q in g0 + g1:
        if not 0 <= q < dist.n_qubits:
            raise ValueError(f"qubit index {q} out of range for {dist.n_qubits} qubits")
    cells = np.zeros((1 << len(g0), 1 << len(g1)), dtype=np.int64)
    for key, count in dist.counts.items():
        i = int("".join(key[q] for q in g0), 2)
        j = int("".join(key[q] for q in g1), 2)
        cells[i, j] += count
    return ContingencyTable(cells)


def _mode(counts: dict[str, int]) -> str:
    return min(counts, key=lambda k: (-counts[k], k))


def _classical_pvalue(marg: MeasurementDistribution, target: str) -> PValue:
    shots = marg.shots
    if marg.counts.get(target, 0) == shots:
        return PValue(1.0, TestMethod.CHI_SQUARE, degrees_of_freedom=0)
    others = sorted(k for k in marg.counts if k != target)
    observed = [marg.counts.get(target, 0)] + [marg.counts[k] for k in others]
    expected = [shots - CLASSICAL_FLOOR * len(others)] + [CLASSICAL_FLOOR] * len(others)
    statistic = chi_square_statistic(observed, expected)
    df = len(others)
    p = upper_regularized_gamma(df / 2.0, statistic / 2.0)
    return PValue(p, TestMethod.CHI_SQUARE, degrees_of_freedom=df)


def assert_classical(circuit: Circuit, at: int | None, qubits,
                     expected_bitstring: str | None = None,
                     alpha: float = DEFAULT_ALPHA, shots: int | None = None,
                     seed: int = 0) -> AssertionResult:
    """Test that the asserted qubits deterministically measure one bitstring.

    The null is a single sharp peak: all mass on the target bitstring, an
    expected count of CLASSICAL_FLOOR on every other observed outcome. The
    target is `expected_bitstring` when supplied (testing "equals this
    string"), otherwise the empirical mode (testing "is classical").
    """
    qubits = tuple(qubits)
    if expected_bitstring is not None and (
            len(expected_bitstring) != len(qubits)
            or any(ch not in "01" for ch in expected_bitstring)):
        raise ValueError(
            f"expected_bitstring {expected_bitstring!r} must be "
            f"{len(qubits)} characters of 0/1")
    shots = shots if shots is not None else default_shots(AssertionKind.CLASSICAL)
    marg = marginalize(sample(circuit, at, shots, seed), list(qubits))
    target = expected_bitstring if expected_bitstring is not None else _mode(marg.counts)
    p_value = _classical_pvalue(marg, target)
    return AssertionResult(
        kind=AssertionKind.CLASSICAL, qubits=qubits, group0=None, group1=None,
        alpha=alpha, p_value=p_value, passed=p_value.value > alpha,
        shots_used=shots, target_bitstring=target)


def assert_uniform(circuit: Circuit, at: int | None, qubits,
                   alpha: float = DEFAULT_ALPHA, shots: int | None = None,
                   seed: int = 0) -> AssertionResult:
    """Test that the asserted qubits are in an equal superposition.

    Chi-square goodness of fit against probability 1/2^n for each of the
    2^n outcomes, unobserved outcomes counting zero.
    """
    qubits = tuple(qubits)
    shots = shots if shots is not None else default_shots(AssertionKind.UNIFORM)
    k = 1 << len(qubits)
    per_cell = shots / k
    if per_cell < 1.0:
        raise InfeasibleShotsError(
            f"uniform assertion over {len(qubits)} qubits has {k} outcomes; "
            f"{shots} shots give an expected count below 1 per outcome "
            f"(need at least {k} shots, at least {5 * k} recommended)")
    if per_cell < 5.0:
        warnings.warn(
            f"uniform assertion: expected count {per_cell:.2f} per outcome is "
            f"below 5; consider at least {5 * k} shots", stacklevel=2)
    marg = marginalize(sample(circuit, at, shots, seed), list(qubits))
    observed = [marg.counts.get(bitstring(i, len(qubits)), 0) for i in range(k)]
    p_value = chi_square_gof_pvalue(observed, [1.0 / k] * k, shots)
    return AssertionResult(
        kind=AssertionKind.UNIFORM, qubits=qubits, group0=None, group1=None,
        alpha=alpha, p_value=p_value, passed=p_value.value > alpha,
        shots_used=shots)


def assert_product(circuit: Circuit, at: int | None, group0, group1,
                   alpha: float = DEFAULT_ALPHA, shots: int | None = None,
                   resamples: int | None = None, seed: int = 0,
                   legacy_chisq: bool = False) -> AssertionResult:
    """Test that two qubit groups are unentangled (statistically independent).

    Builds the full contingency table of the two groups and dispatches:
    Fisher's exact test for 2x2 tables, the Monte Carlo permutation test
    otherwise. passed=True means consistent with a product state;
    passed=False means likely entangled. `legacy_chisq` reroutes through the
    add-1 chi-square baseline regardless of table size.
    """
    group0 = tuple(group0)
    group1 = tuple(group1)
    shots = shots if shots is not None else default_shots(AssertionKind.PRODUCT)
    resamples = resamples if resamples is not None else DEFAULT_RESAMPLES
    dist = sample(circuit, at, shots, seed)
    table = build_contingency_table(dist, group0, group1)
    if legacy_chisq:
        p_value = legacy_chisq_add1(table)
    elif table.cells.shape == (2, 2):
        p_value = fisher_exact_2x2(table)
    else:
        p_value = monte_carlo_independence(table, resamples, seed=seed)
    return AssertionResult(
        kind=AssertionKind.PRODUCT, qubits=(), group0=group0, group1=group1,
        alpha=alpha, p_value=p_value, passed=p_value.value > alpha,
        shots_used=shots, table_shape=table.cells.shape)


def evaluate_checkpoint(circuit: Circuit, index: int,
                        config: "ProgramConfig") -> AssertionResult:
    """Evaluate the assertion directive at circuit.items[index].

    Parameter precedence: an explicit run-config shot override beats the
    directive, which beats the per-kind default; alpha and resamples fall
    back from directive to config. The checkpoint seed is derived from
    (config seed, item index) so checkpoints sample independently.
    """
    item = circuit.items[index]
    if not isinstance(item, AssertionDirective):
        raise ValueError(f"item {index} is not an assertion directive: {item!r}")
    alpha = item.alpha if item.alpha is not None else config.alpha
    shots = config.shots if config.shots is not None else item.shots
    seed = derive_seed(config.seed, index)
    if item.kind == AssertionKind.CLASSICAL:
        result = assert_classical(circuit, index, item.qubits,
                                  expected_bitstring=item.expected_bitstring,
                                  alpha=alpha, shots=shots, seed=seed)
    elif item.kind == AssertionKind.UNIFORM:
        result = assert_uniform(circuit, index, item.qubits, alpha=alpha,
                                shots=shots, seed=seed)
    else:
        resamples = item.resamples if item.resamples is not None else config.resamples
        result = assert_product(circuit, index, item.group0, item.group1,
                                alpha=alpha, shots=shots, resamples=resamples,
                                seed=seed, legacy_chisq=config.legacy_chisq)
    result.expected_verdict = item.expected_verdict
    if item.expected_verdict is not None:
        result.matches_expected = result.passed == item.expected_verdict
    return result
