"""Three ways of attaching photon-pair measurements to the operator square.

A *physical* measurement is a projective measurement on the pair: a joint
linear-polarization measurement (four outcomes, product basis), a
Bell-type measurement (four outcomes, entangled basis), or a one-wing
polarization measurement (two outcomes).  A *derived* measurement is a
+/-1-valued function of one physical measurement's outcome: keep the left
wing, keep the right wing, take the product, or read off an eigenvalue of
a grid operator from a Bell outcome.

Realization 1 uses three physical measurements (Lzz, Lxx, B) and realizes
each cell by exactly one derived measurement; rows are then trivially
simultaneous but no column is.  Realization 2 adds Lzx, Lxz and a second
Bell measurement B', making every context simultaneously measurable at
the price of realizing every cell twice (four of the doublings collapse
under the declared one-wing identifications, five do not).  Realization 3
splits the polarization measurements into single wings (Ll_z, Lr_z, Ll_x,
Lr_x) plus B and B', failing both uniqueness and simultaneity.

Simultaneity here is structural: two derived measurements are
simultaneously measurable iff they are functions of one physical
measurement or are declared identical.  ``check_requirements`` asks the
two questions this module exists for: (i) is every cell uniquely
realized, and (ii) does every commuting pair of cells admit simultaneous
realizers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

import numpy as np

from .errors import InternalConsistencyError
from .qm import IDENTITY4, VERIFY_ATOL, expectation, projector, side_projector
from .square import (
    CONTEXTS,
    Cell,
    Context,
    context_cells,
    eigentable,
)

#: Context whose eigenbasis each four-outcome measurement projects onto.
_MEASUREMENT_CONTEXTS = {
    "Lzz": Context("row", 0),
    "Lxx": Context("row", 1),
    "B": Context("row", 2),
    "Lzx": Context("column", 0),
    "Lxz": Context("column", 1),
    "Bprime": Context("column", 2),
}

#: For the pair polarization measurements: positions of the left-wing and
#: right-wing single-operator columns inside the context's value triples.
_L_SIDE_POS = {"Lzz": (0, 1), "Lxx": (1, 0), "Lzx": (0, 1), "Lxz": (1, 0)}

#: The one-wing measurements a pair measurement resolves into.
_L_SIDE_IDS = {
    "Lzz": ("Ll_z", "Lr_z"),
    "Lxx": ("Ll_x", "Lr_x"),
    "Lzx": ("Ll_z", "Lr_x"),
    "Lxz": ("Ll_x", "Lr_z"),
}

_SIDE_SPEC = {
    "Ll_z": ("Z", "left"),
    "Lr_z": ("Z", "right"),
    "Ll_x": ("X", "left"),
    "Lr_x": ("X", "right"),
}

_BELL_FUNCTIONS = {"B": ("f", "g", "h"), "Bprime": ("fp", "gp", "hp")}

_PAIR_OUTCOME_IDS = ("Lzz", "Lxx", "Lzx", "Lxz")
_SIDE_OUTCOME_IDS = ("Ll_z", "Lr_z", "Ll_x", "Lr_x")


@dataclass(frozen=True)
class PhysicalMeasurement:
    id: str
    outcomes: tuple[int, ...]
    projectors: tuple[np.ndarray, ...]

    def born_distribution(self, state: np.ndarray) -> dict[int, float]:
        return {
            outcome: expectation(state, proj)
            for outcome, proj in zip(self.outcomes, self.projectors)
        }


@dataclass(frozen=True)
class DerivedMeasurement:
    id: str
    parent: str
    outcome_map: dict[int, int]


@dataclass(frozen=True)
class Realization:
    index: int
    physicals: dict[str, PhysicalMeasurement]
    derived: dict[str, DerivedMeasurement]
    cell_map: dict[Cell, tuple[str, ...]]
    identifications: tuple[frozenset[str], ...]


@dataclass(frozen=True)
class RequirementReport:
    unique_realization_ok: bool
    multiply_realized_cells: tuple[tuple[Cell, tuple[str, ...]], ...]
    simultaneity_ok: bool
    broken_contexts: tuple[tuple[Context, tuple[str, str]], ...]


def _verify_resolution(measurement: PhysicalMeasurement) -> None:
    # projectors must be mutually orthogonal and sum to the identity
    total = np.zeros((4, 4), dtype=complex)
    for i, p in enumerate(measurement.projectors):
        total = total + p
        for q in measurement.projectors[i + 1 :]:
            if np.max(np.abs(p @ q)) > VERIFY_ATOL:
                raise InternalConsistencyError(
                    f"{measurement.id}: outcome projectors are not orthogonal"
                )
    if np.max(np.abs(total - IDENTITY4)) > VERIFY_ATOL:
        raise InternalConsistencyError(f"{measurement.id}: projectors do not sum to identity")


def _four_outcome_measurement(meas_id: str) -> PhysicalMeasurement:
    table = eigentable(_MEASUREMENT_CONTEXTS[meas_id])
    measurement = PhysicalMeasurement(
        id=meas_id,
        outcomes=(1, 2, 3, 4),
        projectors=tuple(projector(entry.vector) for entry in table.entries),
    )
    _verify_resolution(measurement)
    return measurement


def _side_measurement(meas_id: str) -> PhysicalMeasurement:
    axis, side = _SIDE_SPEC[meas_id]
    measurement = PhysicalMeasurement(
        id=meas_id,
        outcomes=(1, -1),
        projectors=(side_projector(axis, +1, side), side_projector(axis, -1, side)),
    )
    _verify_resolution(measurement)
    return measurement


def _pair_derived(function: str, meas_id: str) -> DerivedMeasurement:
    """l/r/t of a pair polarization measurement, read off its eigentable."""
    table = eigentable(_MEASUREMENT_CONTEXTS[meas_id])
    left_pos, right_pos = _L_SIDE_POS[meas_id]
    pos = {"l": left_pos, "r": right_pos, "t": 2}[function]
    outcome_map = {o: table.entries[o - 1].values[pos] for o in (1, 2, 3, 4)}
    return DerivedMeasurement(f"{function}({meas_id})", meas_id, outcome_map)


def _bell_derived(function: str, meas_id: str) -> DerivedMeasurement:
    """f/g/h (or the primed versions) of a Bell measurement."""
    table = eigentable(_MEASUREMENT_CONTEXTS[meas_id])
    pos = _BELL_FUNCTIONS[meas_id].index(function)
    outcome_map = {o: table.entries[o - 1].values[pos] for o in (1, 2, 3, 4)}
    return DerivedMeasurement(f"{function}({meas_id})", meas_id, outcome_map)


def _side_derived(meas_id: str) -> DerivedMeasurement:
    # a one-wing measurement is its own +/-1 readout
    return DerivedMeasurement(meas_id, meas_id, {1: 1, -1: -1})


@lru_cache(maxsize=None)
def build_realization(index: int) -> Realization:
    """Measurement tables for realization 1, 2 or 3."""
    if index == 1:
        physicals = {mid: _four_outcome_measurement(mid) for mid in ("Lzz", "Lxx", "B")}
        derived_list = [
            _pair_derived(fn, mid) for mid in ("Lzz", "Lxx") for fn in ("l", "r", "t")
        ] + [_bell_derived(fn, "B") for fn in ("f", "g", "h")]
        cell_map = {
            (0, 0): ("l(Lzz)",),
            (0, 1): ("r(Lzz)",),
            (0, 2): ("t(Lzz)",),
            (1, 0): ("r(Lxx)",),
            (1, 1): ("l(Lxx)",),
            (1, 2): ("t(Lxx)",),
            (2, 0): ("f(B)",),
            (2, 1): ("g(B)",),
            (2, 2): ("h(B)",),
        }
        identifications: tuple[frozenset[str], ...] = ()
    elif index == 2:
        physicals = {
            mid: _four_outcome_measurement(mid)
            for mid in ("Lzz", "Lxx", "Lzx", "Lxz", "B", "Bprime")
        }
        derived_list = [
            _pair_derived(fn, mid)
            for mid in ("Lzz", "Lxx", "Lzx", "Lxz")
            for fn in ("l", "r", "t")
        ]
        derived_list += [_bell_derived(fn, "B") for fn in ("f", "g", "h")]
        derived_list += [_bell_derived(fn, "Bprime") for fn in ("fp", "gp", "hp")]
        cell_map = {
            (0, 0): ("l(Lzz)", "l(Lzx)"),
            (0, 1): ("r(Lzz)", "r(Lxz)"),
            (0, 2): ("t(Lzz)", "fp(Bprime)"),
            (1, 0): ("r(Lxx)", "r(Lzx)"),
            (1, 1): ("l(Lxx)", "l(Lxz)"),
            (1, 2): ("t(Lxx)", "gp(Bprime)"),
            (2, 0): ("f(B)", "t(Lzx)"),
            (2, 1): ("g(B)", "t(Lxz)"),
            (2, 2): ("h(B)", "hp(Bprime)"),
        }
        # one-wing readouts of different pair measurements do the same thing
        # on that wing, so they count as the same measurement
        identifications = (
            frozenset({"l(Lzz)", "l(Lzx)"}),
            frozenset({"r(Lzz)", "r(Lxz)"}),
            frozenset({"r(Lxx)", "r(Lzx)"}),
            frozenset({"l(Lxx)", "l(Lxz)"}),
        )
    elif index == 3:
        physicals = {mid: _side_measurement(mid) for mid in _SIDE_OUTCOME_IDS}
        physicals["B"] = _four_outcome_measurement("B")
        physicals["Bprime"] = _four_outcome_measurement("Bprime")
        derived_list = [_side_derived(mid) for mid in _SIDE_OUTCOME_IDS]
        derived_list += [_bell_derived(fn, "B") for fn in ("f", "g", "h")]
        derived_list += [_bell_derived(fn, "Bprime") for fn in ("fp", "gp", "hp")]
        cell_map = {
            (0, 0): ("Ll_z",),
            (0, 1): ("Lr_z",),
            (0, 2): ("fp(Bprime)",),
            (1, 0): ("Lr_x",),
            (1, 1): ("Ll_x",),
            (1, 2): ("gp(Bprime)",),
            (2, 0): ("f(B)",),
            (2, 1): ("g(B)",),
            (2, 2): ("h(B)", "hp(Bprime)"),
        }
        identifications = ()
    else:
        raise ValueError(f"realization index must be 1, 2 or 3, got {index!r}")

    derived = {d.id: d for d in derived_list}
    for cell, ids in cell_map.items():
        for did in ids:
            if did not in derived:
                raise InternalConsistencyError(f"cell {cell} references unknown {did!r}")
    for d in derived.values():
        if d.parent not in physicals:
            raise InternalConsistencyError(f"{d.id} references unknown parent {d.parent!r}")
    return Realization(index, physicals, derived, cell_map, identifications)


def derived_outcome(measurement: DerivedMeasurement, parent_outcome: int) -> int:
    """Apply a derived measurement's outcome function to a parent outcome."""
    try:
        return measurement.outcome_map[parent_outcome]
    except KeyError:
        raise ValueError(
            f"{measurement.id}: {parent_outcome!r} is not an outcome of {measurement.parent}"
        ) from None


# --- simultaneity structure -------------------------------------------------


def measurement_classes(realization: Realization) -> dict[str, frozenset[str]]:
    """Map each derived id to its identification class (a singleton if unidentified)."""
    classes = {did: frozenset({did}) for did in realization.derived}
    for group in realization.identifications:
        merged = frozenset().union(*(classes[d] for d in group))
        for d in merged:
            classes[d] = merged
    return classes


def cell_classes(realization: Realization, cell: Cell) -> tuple[tuple[str, ...], ...]:
    """Identification classes realizing a cell, keeping cell_map order.

    Each class is returned as a tuple ordered by cell_map appearance; its
    first element serves as the class representative.
    """
    classes = measurement_classes(realization)
    seen: list[frozenset[str]] = []
    out: list[tuple[str, ...]] = []
    for did in realization.cell_map[cell]:
        cls = classes[did]
        if cls not in seen:
            seen.append(cls)
            members = [d for d in realization.cell_map[cell] if d in cls]
            members += sorted(cls - set(members))
            out.append(tuple(members))
    return tuple(out)


def classes_compatible(
    realization: Realization, class_a: tuple[str, ...], class_b: tuple[str, ...]
) -> bool:
    """Whether two identification classes are simultaneously measurable.

    True iff they are the same class or some pair of members shares a
    parent physical measurement.
    """
    if set(class_a) == set(class_b):
        return True
    parents_a = {realization.derived[d].parent for d in class_a}
    parents_b = {realization.derived[d].parent for d in class_b}
    return bool(parents_a & parents_b)


def check_requirements(realization: Realization) -> RequirementReport:
    """Evaluate uniqueness (i) and simultaneity (ii) for a realization.

    A cell breaks (i) if it is still multiply realized after identified
    measurements are merged.  A context breaks (ii) if two of its cells
    admit no simultaneously measurable pair of realizers; every realizer
    pair across such a cell pair is reported.
    """
    multiply: list[tuple[Cell, tuple[str, ...]]] = []
    for cell in sorted(realization.cell_map):
        if len(cell_classes(realization, cell)) > 1:
            multiply.append((cell, realization.cell_map[cell]))

    broken: list[tuple[Context, tuple[str, str]]] = []
    for context in CONTEXTS:
        for c1, c2 in itertools.combinations(context_cells(context), 2):
            classes1 = cell_classes(realization, c1)
            classes2 = cell_classes(realization, c2)
            if any(
                classes_compatible(realization, a, b) for a in classes1 for b in classes2
            ):
                continue
            for d1 in realization.cell_map[c1]:
                for d2 in realization.cell_map[c2]:
                    broken.append((context, (d1, d2)))

    return RequirementReport(
        unique_realization_ok=not multiply,
        multiply_realized_cells=tuple(multiply),
        simultaneity_ok=not broken,
        broken_contexts=tuple(broken),
    )


def cell_of_derived(realization: Realization, derived_id: str) -> Cell:
    """The unique cell a derived measurement realizes."""
    cells = [cell for cell, ids in realization.cell_map.items() if derived_id in ids]
    if len(cells) != 1:
        raise InternalConsistencyError(f"{derived_id} realizes {len(cells)} cells")
    return cells[0]


def derived_born_distribution(
    realization: Realization, derived_id: str, state: np.ndarray
) -> dict[int, float]:
    """Quantum outcome distribution of a derived measurement in a state."""
    d = realization.derived[derived_id]
    parent = realization.physicals[d.parent]
    dist = {1: 0.0, -1: 0.0}
    for outcome, probability in parent.born_distribution(state).items():
        dist[d.outcome_map[outcome]] += probability
    return dist


# --- outcome translation between realizations 2 and 3 ----------------------


def translate_outcomes(pair_outcomes: Mapping[str, int]) -> dict[str, int]:
    """Convert the four pair-measurement outcome indices to one-wing values.

    The input must assign an outcome 1..4 to each of Lzz, Lxx, Lzx, Lxz and
    must be consistent: both measurements touching a wing have to imply the
    same +/-1 value there.  Inconsistent tuples raise ValueError naming the
    clashing measurements.
    """
    if set(pair_outcomes) != set(_PAIR_OUTCOME_IDS):
        raise ValueError(f"expected outcomes for exactly {_PAIR_OUTCOME_IDS}")
    implied: dict[str, dict[str, int]] = {sid: {} for sid in _SIDE_OUTCOME_IDS}
    for pid in _PAIR_OUTCOME_IDS:
        outcome = pair_outcomes[pid]
        if outcome not in (1, 2, 3, 4):
            raise ValueError(f"{pid}: outcome must be 1..4, got {outcome!r}")
        table = eigentable(_MEASUREMENT_CONTEXTS[pid])
        left_pos, right_pos = _L_SIDE_POS[pid]
        left_id, right_id = _L_SIDE_IDS[pid]
        values = table.entries[outcome - 1].values
        implied[left_id][pid] = values[left_pos]
        implied[right_id][pid] = values[right_pos]
    out: dict[str, int] = {}
    for sid in _SIDE_OUTCOME_IDS:
        sources = implied[sid]
        if len(set(sources.values())) > 1:
            a, b = sorted(sources)
            raise ValueError(
                f"inconsistent outcomes for {sid}: {a}={pair_outcomes[a]} implies "
                f"{sources[a]:+d} but {b}={pair_outcomes[b]} implies {sources[b]:+d}"
            )
        out[sid] = next(iter(sources.values()))
    return out


def translate_outcomes_inverse(side_outcomes: Mapping[str, int]) -> dict[str, int]:
    """Convert four one-wing +/-1 values back to pair-measurement outcome indices."""
    if set(side_outcomes) != set(_SIDE_OUTCOME_IDS):
        raise ValueError(f"expected outcomes for exactly {_SIDE_OUTCOME_IDS}")
    for sid, value in side_outcomes.items():
        if value not in (1, -1):
            raise ValueError(f"{sid}: outcome must be +1 or -1, got {value!r}")
    out: dict[str, int] = {}
    for pid in _PAIR_OUTCOME_IDS:
        table = eigentable(_MEASUREMENT_CONTEXTS[pid])
        left_pos, right_pos = _L_SIDE_POS[pid]
        left_id, right_id = _L_SIDE_IDS[pid]
        matches = [
            o
            for o in (1, 2, 3, 4)
            if table.entries[o - 1].values[left_pos] == side_outcomes[left_id]
            and table.entries[o - 1].values[right_pos] == side_outcomes[right_id]
        ]
        if len(matches) != 1:
            raise InternalConsistencyError(f"{pid}: wing values do not index a unique outcome")
        out[pid] = matches[0]
    return out


def consistent_pair_outcomes() -> list[dict[str, int]]:
    """The 16 consistent pair-outcome tuples, one per one-wing value tuple."""
    tuples = []
    for values in itertools.product((1, -1), repeat=4):
        side = dict(zip(_SIDE_OUTCOME_IDS, values))
        tuples.append(translate_outcomes_inverse(side))
    return tuples
