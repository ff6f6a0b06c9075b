"""Deterministic noncontextual hidden-variable models for the realizations.

Each hidden state fixes one outcome for every *physical* measurement of a
realization; derived measurements respond through their outcome maps, so
a response can only depend on the hidden state and the parent measurement,
never on what else is measured alongside.  The hidden-state distribution
is fixed by the quantum state alone.

Model 1 (realization 1) uses 4^3 = 64 hidden states, one per outcome
triple of (Lzz, Lxx, B), weighted by the product of the three Born
probabilities.  Models 2 and 3 share a single construction over the six
measurements of realization 3: 2^4 * 4^2 = 256 hidden states weighted by
p(i,j,k,l) * Born(B=m) * Born(B'=n), where p is a joint distribution over
the four one-wing polarization values that reproduces the four measurable
pairwise joints.  Such a joint exists exactly when the fixed-setting CHSH
bound |S| <= 2 holds, and it is found (or refuted with a Farkas
certificate) by linear feasibility; realization 2 gets the same states
through the outcome translation.

``violation_witnesses`` exhibits how the models escape the square's no-go
argument: hidden states whose value triple in a *non-simultaneous*
context falls outside the admissible eigenvalue triples, and hidden
states where two different realizers of one cell disagree.  Inside every
simultaneously measurable context the induced triples are always
admissible, which the same scan asserts.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import feasibility
from .errors import InfeasibleModelError, InternalConsistencyError
from .qm import VERIFY_ATOL, apply, born_probability, expectation, ket, pauli_tensor, side_projector
from .square import CONTEXTS, Context, admissible_triples, context_cells, eigentable
from .realizations import (
    Realization,
    build_realization,
    cell_classes,
    classes_compatible,
    translate_outcomes_inverse,
)

#: Hidden states with probability at or below this threshold are ignored
#: by the witness scans.
POSITIVE_PROBABILITY = 1e-12

_SIGNS = (1, -1)

#: Axis pairs (left, right) of the measurable polarization joints.
PAIR_AXES = (("z", "z"), ("z", "x"), ("x", "z"), ("x", "x"))

#: Variable order of the joint distribution: (left-z, right-z, left-x, right-x).
JOINT_KEYS = tuple(itertools.product(_SIGNS, repeat=4))

#: Which joint-key slots a pair of axes reads: left z/x -> slot 0/2,
#: right z/x -> slot 1/3.
_PAIR_SLOTS = {("z", "z"): (0, 1), ("z", "x"): (0, 3), ("x", "z"): (2, 1), ("x", "x"): (2, 3)}

_AXIS_LABEL = {"z": "Z", "x": "X"}

#: One-wing measurement ids in joint-key slot order.
_SIDE_IDS = ("Ll_z", "Lr_z", "Ll_x", "Lr_x")

_WING_PAIRS = (("Ll_z", "Lr_z"), ("Ll_z", "Lr_x"), ("Ll_x", "Lr_z"), ("Ll_x", "Lr_x"))


@dataclass(frozen=True)
class HiddenState:
    outcomes: dict[str, int]
    probability: float


@dataclass(frozen=True)
class HVModel:
    realization_index: int
    measurement_ids: tuple[str, ...]
    states: tuple[HiddenState, ...]

    def marginal(self, measurement_id: str) -> dict[int, float]:
        """Model-induced outcome distribution of one physical measurement."""
        dist: dict[int, float] = {}
        for state in self.states:
            outcome = state.outcomes[measurement_id]
            dist[outcome] = dist.get(outcome, 0.0) + state.probability
        return dist

    def joint_marginal(self, id_a: str, id_b: str) -> dict[tuple[int, int], float]:
        dist: dict[tuple[int, int], float] = {}
        for state in self.states:
            key = (state.outcomes[id_a], state.outcomes[id_b])
            dist[key] = dist.get(key, 0.0) + state.probability
        return dist


@dataclass(frozen=True)
class CHReport:
    """Fixed-setting CHSH evaluation for the z/x polarization correlators.

    ``chsh_values`` holds the four sign placements in the order: minus on
    the (x,x), (x,z), (z,x), (z,z) correlator respectively.
    """

    correlators: dict[tuple[str, str], float]
    chsh_values: tuple[float, float, float, float]
    max_abs: float
    violated: bool


@dataclass(frozen=True)
class FineResult:
    status: str  # "feasible" | "infeasible"
    joint: dict[tuple[int, int, int, int], float] | None
    certificate: np.ndarray | None
    ch: CHReport
    system: feasibility.LinearSystem


def chsh_max_state() -> np.ndarray:
    """The unit eigenvector of zz + zx + xz - xx with eigenvalue 2*sqrt(2).

    That operator squares to 4*I + 4*(Y(x)Y), so 2*sqrt(2) is its largest
    eigenvalue; the closed-form vector is checked against the operator
    before it is returned.
    """
    s = math.sqrt(2.0)
    v = np.array([1.0, s - 1.0, s - 1.0, -1.0], dtype=complex)
    v = v / np.linalg.norm(v)
    witness_op = (
        pauli_tensor("Z", "Z")
        + pauli_tensor("Z", "X")
        + pauli_tensor("X", "Z")
        - pauli_tensor("X", "X")
    )
    residual = float(np.max(np.abs(apply(witness_op, v) - 2.0 * s * v)))
    if residual > VERIFY_ATOL:
        raise InternalConsistencyError(
            f"CHSH witness state failed the eigenvector check (residual {residual:.3e})"
        )
    return v


def ch_report(state: np.ndarray) -> CHReport:
    """Correlators E(s,t) = <sigma_s (x) sigma_t> for s,t in {z,x} and the CHSH values."""
    correlators = {
        (s, t): expectation(state, pauli_tensor(_AXIS_LABEL[s], _AXIS_LABEL[t]))
        for s, t in PAIR_AXES
    }
    e1, e2, e3, e4 = (correlators[pair] for pair in PAIR_AXES)
    chsh_values = (
        e1 + e2 + e3 - e4,
        e1 + e2 - e3 + e4,
        e1 - e2 + e3 + e4,
        -e1 + e2 + e3 + e4,
    )
    max_abs = max(abs(v) for v in chsh_values)
    return CHReport(correlators, chsh_values, max_abs, violated=max_abs > 2.0 + 1e-9)


def quantum_pair_joints(
    state: np.ndarray,
) -> dict[tuple[str, str], dict[tuple[int, int], float]]:
    """Born joints of the four measurable one-wing polarization pairs."""
    joints: dict[tuple[str, str], dict[tuple[int, int], float]] = {}
    for left_axis, right_axis in PAIR_AXES:
        dist = {}
        for a, b in itertools.product(_SIGNS, repeat=2):
            proj = side_projector(_AXIS_LABEL[left_axis], a, "left") @ side_projector(
                _AXIS_LABEL[right_axis], b, "right"
            )
            dist[(a, b)] = expectation(state, proj)
        joints[(left_axis, right_axis)] = dist
    return joints


def fine_system(state: np.ndarray) -> feasibility.LinearSystem:
    """The 16-variable feasibility system for a joint one-wing distribution.

    One normalization row plus, for each measurable pair and outcome
    combination, the requirement that the joint's pairwise marginal equal
    the Born joint.
    """
    joints = quantum_pair_joints(state)
    rows: list[tuple[list[float], float]] = [([1.0] * len(JOINT_KEYS), 1.0)]
    for pair in PAIR_AXES:
        slot_a, slot_b = _PAIR_SLOTS[pair]
        for a, b in itertools.product(_SIGNS, repeat=2):
            coeffs = [
                1.0 if key[slot_a] == a and key[slot_b] == b else 0.0 for key in JOINT_KEYS
            ]
            rows.append((coeffs, joints[pair][(a, b)]))
    return feasibility.LinearSystem.from_rows(len(JOINT_KEYS), rows)


def fine_joint(state: np.ndarray) -> FineResult:
    """Find a joint one-wing distribution matching the measurable pairs.

    Returns a feasible point as a 16-entry joint, or an infeasibility
    certificate; the attached CHSH report tells the two outcomes apart
    up to the numerical boundary at |S| = 2.
    """
    state = ket(state)
    system = fine_system(state)
    result = feasibility.solve(system)
    report = ch_report(state)
    if result.status == "feasible":
        joint = {key: float(p) for key, p in zip(JOINT_KEYS, result.point)}
        return FineResult("feasible", joint, None, report, system)
    return FineResult("infeasible", None, result.certificate, report, system)


def build_model1(state: np.ndarray) -> HVModel:
    """Product model over the outcomes of Lzz, Lxx and B (64 hidden states)."""
    state = ket(state)
    weights = {
        mid: [born_probability(state, entry.vector) for entry in eigentable(context).entries]
        for mid, context in (
            ("Lzz", Context("row", 0)),
            ("Lxx", Context("row", 1)),
            ("B", Context("row", 2)),
        )
    }
    states = tuple(
        HiddenState(
            {"Lzz": i, "Lxx": j, "B": k},
            weights["Lzz"][i - 1] * weights["Lxx"][j - 1] * weights["B"][k - 1],
        )
        for i, j, k in itertools.product((1, 2, 3, 4), repeat=3)
    )
    return HVModel(1, ("Lzz", "Lxx", "B"), states)


def build_model23(state: np.ndarray, realization_index: int = 3) -> HVModel:
    """Joint-distribution model over six measurements (256 hidden states).

    Built for realization 3; ``realization_index=2`` expresses the same
    hidden states through the pair-measurement outcomes instead.  Raises
    InfeasibleModelError (carrying the CHSH report and certificate) when
    no joint one-wing distribution exists for the state.
    """
    if realization_index not in (2, 3):
        raise ValueError(f"realization index must be 2 or 3, got {realization_index!r}")
    state = ket(state)
    fine = fine_joint(state)
    if fine.status != "feasible":
        raise InfeasibleModelError(
            "no joint one-wing distribution exists for this state "
            f"(CHSH max |S| = {fine.ch.max_abs:.6f} > 2); the construction is unavailable",
            fine_result=fine,
        )
    bell_weights = {
        mid: [born_probability(state, entry.vector) for entry in eigentable(context).entries]
        for mid, context in (("B", Context("row", 2)), ("Bprime", Context("column", 2)))
    }
    states = []
    for key in JOINT_KEYS:
        base = fine.joint[key]
        side = dict(zip(_SIDE_IDS, key))
        for m, n in itertools.product((1, 2, 3, 4), repeat=2):
            p = base * bell_weights["B"][m - 1] * bell_weights["Bprime"][n - 1]
            if realization_index == 3:
                outcomes = dict(side)
            else:
                outcomes = translate_outcomes_inverse(side)
            outcomes["B"] = m
            outcomes["Bprime"] = n
            states.append(HiddenState(outcomes, p))
    measurement_ids = (
        ("Lzz", "Lxx", "Lzx", "Lxz", "B", "Bprime")
        if realization_index == 2
        else ("Ll_z", "Lr_z", "Ll_x", "Lr_x", "B", "Bprime")
    )
    return HVModel(realization_index, measurement_ids, tuple(states))


# --- model verification -----------------------------------------------------


@dataclass(frozen=True)
class StatisticsReport:
    """Model marginals against Born distributions, one deviation per check."""

    measurement_deviations: dict[str, float]
    pair_joint_deviations: dict[str, float]
    max_abs_deviation: float
    probability_sum: float
    tolerance: float
    passed: bool


def reproduce_statistics(
    model: HVModel, state: np.ndarray, *, tolerance: float | None = None
) -> StatisticsReport:
    """Compare every physical measurement's model marginal with the Born rule.

    For realization 3 the four measurable one-wing pair joints are checked
    as well (for realization 2 those joints are the pair measurements'
    own distributions).  The default tolerance is 1e-12 for model 1, whose
    marginals are exact products, and 1e-9 for models 2/3, whose joints
    come out of the feasibility solver.
    """
    state = ket(state)
    if tolerance is None:
        tolerance = 1e-12 if model.realization_index == 1 else 1e-9
    realization = build_realization(model.realization_index)
    deviations: dict[str, float] = {}
    for mid in model.measurement_ids:
        born = realization.physicals[mid].born_distribution(state)
        marginal = model.marginal(mid)
        deviations[mid] = max(
            abs(marginal.get(outcome, 0.0) - p) for outcome, p in born.items()
        )
    pair_deviations: dict[str, float] = {}
    if model.realization_index == 3:
        born_joints = quantum_pair_joints(state)
        for (id_a, id_b), pair in zip(_WING_PAIRS, PAIR_AXES):
            joint = model.joint_marginal(id_a, id_b)
            pair_deviations[f"{id_a},{id_b}"] = max(
                abs(joint.get(key, 0.0) - p) for key, p in born_joints[pair].items()
            )
    probability_sum = float(sum(s.probability for s in model.states))
    worst = max(
        [*deviations.values(), *pair_deviations.values(), abs(probability_sum - 1.0)]
    )
    return StatisticsReport(
        measurement_deviations=deviations,
        pair_joint_deviations=pair_deviations,
        max_abs_deviation=worst,
        probability_sum=probability_sum,
        tolerance=tolerance,
        passed=worst <= tolerance,
    )


def audit_noncontextuality(model: HVModel, realization: Realization) -> bool:
    """Verify the model's layout cannot express context dependence.

    Every hidden state must assign exactly one in-range outcome to each
    physical measurement of the realization, with nonnegative weight;
    derived responses are then outcome-map lookups keyed by the parent
    alone.  Returns False if the layout is corrupted.
    """
    if model.realization_index != realization.index:
        return False
    physical_ids = set(realization.physicals)
    if set(model.measurement_ids) != physical_ids:
        return False
    for state in model.states:
        if set(state.outcomes) != physical_ids:
            return False
        if state.probability < -POSITIVE_PROBABILITY:
            return False
        for mid, outcome in state.outcomes.items():
            if outcome not in realization.physicals[mid].outcomes:
                return False
    for derived in realization.derived.values():
        parent = realization.physicals.get(derived.parent)
        if parent is None or set(derived.outcome_map) != set(parent.outcomes):
            return False
    return True


def _class_response(
    realization: Realization, cls: tuple[str, ...], outcomes: Mapping[str, int]
) -> int:
    """Response of an identification class in a hidden state.

    All members must agree (identified measurements read the same wing),
    so a disagreement is a construction bug.
    """
    values = set()
    for did in cls:
        derived = realization.derived[did]
        values.add(derived.outcome_map[outcomes[derived.parent]])
    if len(values) != 1:
        raise InternalConsistencyError(
            f"identified measurements {cls} disagree in a hidden state"
        )
    return values.pop()


@dataclass(frozen=True)
class ContextWitness:
    """A hidden state whose triple in a non-simultaneous context is inadmissible."""

    context: Context
    measurement_ids: tuple[str, str, str]
    state_index: int
    outcomes: dict[str, int]
    triple: tuple[int, int, int]
    probability: float


@dataclass(frozen=True)
class CellWitness:
    """A hidden state where two different realizers of one cell disagree."""

    cell: tuple[int, int]
    measurement_ids: tuple[str, str]
    state_index: int
    outcomes: dict[str, int]
    values: tuple[int, int]
    probability: float


@dataclass(frozen=True)
class WitnessReport:
    context_witnesses: tuple[ContextWitness, ...]
    cell_witnesses: tuple[CellWitness, ...]
    simultaneous_violations: tuple[ContextWitness, ...]
    simultaneous_choices_checked: int


def violation_witnesses(model: HVModel, realization: Realization) -> WitnessReport:
    """Scan positive-probability hidden states for constraint escapes.

    For every context and every choice of one realizer class per cell:
    if the choice is simultaneously measurable its induced triples must
    be admissible (violations are collected separately and signal a bug);
    otherwise inadmissible triples are reported as witnesses.  Cells with
    several realizer classes are additionally scanned for states where
    the classes disagree.
    """
    if model.realization_index != realization.index:
        raise ValueError("model and realization indices do not match")
    positive = [
        (index, state)
        for index, state in enumerate(model.states)
        if state.probability > POSITIVE_PROBABILITY
    ]

    context_witnesses: list[ContextWitness] = []
    simultaneous_violations: list[ContextWitness] = []
    simultaneous_choices = 0
    for context in CONTEXTS:
        cells = context_cells(context)
        admissible = admissible_triples(context)
        class_options = [cell_classes(realization, cell) for cell in cells]
        for choice in itertools.product(*class_options):
            simultaneous = all(
                classes_compatible(realization, a, b)
                for a, b in itertools.combinations(choice, 2)
            )
            if simultaneous:
                simultaneous_choices += 1
            representatives = tuple(cls[0] for cls in choice)
            for index, state in positive:
                triple = tuple(
                    _class_response(realization, cls, state.outcomes) for cls in choice
                )
                if triple in admissible:
                    continue
                witness = ContextWitness(
                    context, representatives, index, dict(state.outcomes), triple,
                    state.probability,
                )
                if simultaneous:
                    simultaneous_violations.append(witness)
                else:
                    context_witnesses.append(witness)

    cell_witnesses: list[CellWitness] = []
    for cell in sorted(realization.cell_map):
        classes = cell_classes(realization, cell)
        for cls_a, cls_b in itertools.combinations(classes, 2):
            for index, state in positive:
                value_a = _class_response(realization, cls_a, state.outcomes)
                value_b = _class_response(realization, cls_b, state.outcomes)
                if value_a != value_b:
                    cell_witnesses.append(
                        CellWitness(
                            cell, (cls_a[0], cls_b[0]), index, dict(state.outcomes),
                            (value_a, value_b), state.probability,
                        )
                    )

    return WitnessReport(
        tuple(context_witnesses),
        tuple(cell_witnesses),
        tuple(simultaneous_violations),
        simultaneous_choices,
    )


# --- seeded sampling ---------------------------------------------------------


@dataclass(frozen=True)
class MeasurementSample:
    counts: dict[int, int]
    frequencies: dict[int, float]
    born: dict[int, float]
    tv_distance: float


@dataclass(frozen=True)
class SampleReport:
    shots: int
    seed: int
    measurements: dict[str, MeasurementSample]
    tv_bound: float
    passed: bool


def sample_model(model: HVModel, state: np.ndarray, shots: int, seed: int) -> SampleReport:
    """Draw hidden states i.i.d. and tally every physical measurement.

    Randomness comes from NumPy's Philox counter-based generator keyed by
    ``seed``; the s-th variate of that stream decides shot s, so runs are
    reproducible across platforms and shardable by counter offset.  The
    pass flag checks every total-variation distance against 5/sqrt(shots).
    """
    if shots <= 0:
        raise ValueError(f"shots must be positive, got {shots!r}")
    state = ket(state)
    realization = build_realization(model.realization_index)
    probabilities = np.array([max(s.probability, 0.0) for s in model.states])
    cumulative = np.cumsum(probabilities / probabilities.sum())
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    draws = rng.random(shots)
    indices = np.minimum(
        np.searchsorted(cumulative, draws, side="right"), len(probabilities) - 1
    )

    tv_bound = 5.0 / math.sqrt(shots)
    measurements: dict[str, MeasurementSample] = {}
    for mid in model.measurement_ids:
        outcome_by_state = np.array([s.outcomes[mid] for s in model.states])
        sampled = outcome_by_state[indices]
        born = realization.physicals[mid].born_distribution(state)
        counts = {
            outcome: int(np.count_nonzero(sampled == outcome))
            for outcome in realization.physicals[mid].outcomes
        }
        frequencies = {outcome: count / shots for outcome, count in counts.items()}
        tv = 0.5 * sum(abs(frequencies[o] - born[o]) for o in born)
        measurements[mid] = MeasurementSample(counts, frequencies, born, tv)

    passed = all(sample.tv_distance < tv_bound for sample in measurements.values())
    return SampleReport(shots, seed, measurements, tv_bound, passed)
