"""The 3x3 two-qubit operator square and its admissible-value structure.

The grid of operators is

    Z(x)I   I(x)Z   Z(x)Z
    I(x)X   X(x)I   X(x)X
    Z(x)X   X(x)Z   Y(x)Y

Two entries commute exactly when they share a row or a column.  Every row
and the first two columns multiply to +identity; the third column
multiplies to -identity.  Each context (row or column) carries a table of
four common eigenvectors with their eigenvalue triples; the tables are
transcribed below and re-verified against the operators on first use.

No +/-1 assignment to the nine cells can agree with some admissible
eigenvalue triple in all six contexts at once; ``search_assignments``
establishes this by enumerating all 512 candidates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple

import numpy as np

from .errors import InternalConsistencyError
from .qm import VERIFY_ATOL, IDENTITY4, apply, commutator, inner, pauli_tensor, product_ket

Cell = tuple[int, int]


class Context(NamedTuple):
    """A row or column of the square, the unit of simultaneous measurability."""

    kind: str  # "row" or "column"
    index: int

    @property
    def name(self) -> str:
        return ("row" if self.kind == "row" else "col") + str(self.index)


ROW_CONTEXTS = tuple(Context("row", i) for i in range(3))
COLUMN_CONTEXTS = tuple(Context("column", i) for i in range(3))
CONTEXTS = ROW_CONTEXTS + COLUMN_CONTEXTS

_CONTEXT_BY_NAME = {c.name: c for c in CONTEXTS}
_CONTEXT_BY_NAME.update({f"r{c.index}": c for c in ROW_CONTEXTS})
_CONTEXT_BY_NAME.update({f"c{c.index}": c for c in COLUMN_CONTEXTS})


def context_from_name(name: str) -> Context:
    """Parse "row0".."row2"/"col0".."col2" (or the short forms r0..c2)."""
    try:
        return _CONTEXT_BY_NAME[name.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown context name {name!r}") from None


def context_cells(context: Context) -> tuple[Cell, Cell, Cell]:
    """Cells of a context in canonical order: left-to-right, top-to-bottom."""
    if context.kind == "row":
        return tuple((context.index, col) for col in range(3))
    return tuple((row, context.index) for row in range(3))


CELLS: tuple[Cell, ...] = tuple(itertools.product(range(3), range(3)))

_LAYOUT = (
    (("Z", "I"), ("I", "Z"), ("Z", "Z")),
    (("I", "X"), ("X", "I"), ("X", "X")),
    (("Z", "X"), ("X", "Z"), ("Y", "Y")),
)


@dataclass(frozen=True)
class PMSquare:
    """The operator grid; ``grid[r][c]`` holds the (left, right) Pauli labels."""

    grid: tuple[tuple[tuple[str, str], ...], ...]

    def labels(self, cell: Cell) -> tuple[str, str]:
        return self.grid[cell[0]][cell[1]]

    def operator(self, cell: Cell) -> np.ndarray:
        return pauli_tensor(*self.labels(cell))

    @property
    def cells(self) -> tuple[Cell, ...]:
        return CELLS


def build_square() -> PMSquare:
    return PMSquare(_LAYOUT)


# --- eigenvector tables ---------------------------------------------------
#
# Value triples follow the context's operator order (same order as
# context_cells).  In every context the four triples are exactly the four
# sign patterns whose product equals the context's operator-product sign.

_PLUS_TRIPLES = ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))
_MINUS_TRIPLES = ((1, 1, -1), (1, -1, 1), (-1, 1, 1), (-1, -1, -1))

_SQRT2 = np.sqrt(2.0)


def _bell(pattern_a: str, pattern_b: str, sign: int) -> np.ndarray:
    return (product_ket(pattern_a) + sign * product_ket(pattern_b)) / _SQRT2


_TABLE_STATES: dict[Context, tuple[tuple[str, np.ndarray], ...]] = {
    Context("row", 0): (
        ("psi1", product_ket("00")),
        ("psi2", product_ket("01")),
        ("psi3", product_ket("10")),
        ("psi4", product_ket("11")),
    ),
    Context("row", 1): (
        ("psiP1", product_ket("++")),
        ("psiP2", product_ket("-+")),
        ("psiP3", product_ket("+-")),
        ("psiP4", product_ket("--")),
    ),
    Context("row", 2): (
        ("psiPP1", _bell("0+", "1-", +1)),
        ("psiPP2", _bell("0+", "1-", -1)),
        ("psiPP3", _bell("1+", "0-", +1)),
        ("psiPP4", _bell("1+", "0-", -1)),
    ),
    Context("column", 0): (
        ("phi1", product_ket("0+")),
        ("phi2", product_ket("0-")),
        ("phi3", product_ket("1+")),
        ("phi4", product_ket("1-")),
    ),
    Context("column", 1): (
        ("phiP1", product_ket("+0")),
        ("phiP2", product_ket("-0")),
        ("phiP3", product_ket("+1")),
        ("phiP4", product_ket("-1")),
    ),
    Context("column", 2): (
        ("phiPP1", _bell("00", "11", +1)),
        ("phiPP2", _bell("00", "11", -1)),
        ("phiPP3", _bell("01", "10", +1)),
        ("phiPP4", _bell("01", "10", -1)),
    ),
}

#: Every table state by label; doubles as the CLI's named-state catalogue.
NAMED_STATES: dict[str, np.ndarray] = {
    label: vector for entries in _TABLE_STATES.values() for label, vector in entries
}


@dataclass(frozen=True)
class EigenEntry:
    label: str
    vector: np.ndarray
    values: tuple[int, int, int]


@dataclass(frozen=True)
class EigenTable:
    context: Context
    entries: tuple[EigenEntry, ...]


def expected_context_sign(context: Context) -> int:
    """Sign of the product of the three context operators: -1 only for column 2."""
    return -1 if context == Context("column", 2) else +1


def verify_eigentable(table: EigenTable) -> None:
    """Check orthonormality, the eigen relations, and the value products.

    Raises InternalConsistencyError on any failure; a failure means the
    transcribed table data does not match the operators.
    """
    square = build_square()
    ops = [square.operator(cell) for cell in context_cells(table.context)]
    sign = expected_context_sign(table.context)
    if len(table.entries) != 4:
        raise InternalConsistencyError(f"{table.context.name}: expected 4 entries")
    for i, entry in enumerate(table.entries):
        for j, other in enumerate(table.entries):
            overlap = inner(entry.vector, other.vector)
            target = 1.0 if i == j else 0.0
            if abs(overlap - target) > VERIFY_ATOL:
                raise InternalConsistencyError(
                    f"{table.context.name}: entries {entry.label}/{other.label} "
                    f"not orthonormal (overlap {overlap!r})"
                )
        if int(np.prod(entry.values)) != sign:
            raise InternalConsistencyError(
                f"{table.context.name}: {entry.label} values {entry.values} "
                f"do not multiply to {sign:+d}"
            )
        for op, value in zip(ops, entry.values):
            residual = np.max(np.abs(apply(op, entry.vector) - value * entry.vector))
            if residual > VERIFY_ATOL:
                raise InternalConsistencyError(
                    f"{table.context.name}: {entry.label} is not a {value:+d} "
                    f"eigenvector (residual {residual:.3e})"
                )


@lru_cache(maxsize=None)
def eigentable(context: Context) -> EigenTable:
    """Common-eigenbasis table of a context, verified before it is returned."""
    if context not in _TABLE_STATES:
        raise ValueError(f"unknown context {context!r}")
    triples = _MINUS_TRIPLES if expected_context_sign(context) < 0 else _PLUS_TRIPLES
    entries = tuple(
        EigenEntry(label, vector, values)
        for (label, vector), values in zip(_TABLE_STATES[context], triples)
    )
    table = EigenTable(context, entries)
    verify_eigentable(table)
    return table


@lru_cache(maxsize=None)
def admissible_triples(context: Context) -> frozenset[tuple[int, int, int]]:
    """The four value triples a simultaneous measurement of the context can yield."""
    return frozenset(entry.values for entry in eigentable(context).entries)


# --- structural checks ----------------------------------------------------


def commutation_relation(square: PMSquare) -> dict[tuple[Cell, Cell], bool]:
    """Classify all 36 unordered cell pairs as commuting or not.

    The computed classification is asserted against the same-row-or-column
    predicate; a mismatch raises InternalConsistencyError.
    """
    result: dict[tuple[Cell, Cell], bool] = {}
    cells = square.cells
    for i, c1 in enumerate(cells):
        for c2 in cells[i + 1 :]:
            comm = commutator(square.operator(c1), square.operator(c2))
            commutes = bool(np.max(np.abs(comm)) <= VERIFY_ATOL)
            predicted = c1[0] == c2[0] or c1[1] == c2[1]
            if commutes != predicted:
                raise InternalConsistencyError(
                    f"commutation of {c1}/{c2}: computed {commutes}, "
                    f"but same-row-or-column predicts {predicted}"
                )
            result[(c1, c2)] = commutes
    return result


def context_operator_product(square: PMSquare, context: Context) -> int:
    """Sign s such that the ordered product of the context operators is s*identity."""
    a, b, c = (square.operator(cell) for cell in context_cells(context))
    prod = a @ b @ c
    for sign in (+1, -1):
        if np.max(np.abs(prod - sign * IDENTITY4)) <= VERIFY_ATOL:
            if sign != expected_context_sign(context):
                raise InternalConsistencyError(
                    f"{context.name}: operator product is {sign:+d}*I, "
                    f"expected {expected_context_sign(context):+d}*I"
                )
            return sign
    raise InternalConsistencyError(f"{context.name}: operator product is not +/-identity")


# --- exhaustive assignment search ------------------------------------------


@dataclass(frozen=True, order=True)
class Assignment:
    """A total +/-1 assignment to the nine cells, row-major."""

    values: tuple[int, ...]

    def value(self, cell: Cell) -> int:
        return self.values[cell[0] * 3 + cell[1]]

    def context_values(self, context: Context) -> tuple[int, int, int]:
        return tuple(self.value(cell) for cell in context_cells(context))

    def grid(self) -> tuple[tuple[int, int, int], ...]:
        return tuple(self.values[r * 3 : r * 3 + 3] for r in range(3))


def search_assignments(active_constraints: Iterable[Context] | None = None) -> list[Assignment]:
    """Enumerate all 512 assignments and keep those admissible in every active context.

    ``active_constraints=None`` activates all six contexts, for which the
    result is empty: that emptiness is the no-go contradiction.  Results are
    in lexicographic order of the row-major value tuple (-1 before +1).
    """
    active = CONTEXTS if active_constraints is None else tuple(active_constraints)
    for context in active:
        if context not in CONTEXTS:
            raise ValueError(f"unknown context {context!r}")
    admissible = {context: admissible_triples(context) for context in active}
    survivors = []
    for values in itertools.product((-1, 1), repeat=9):
        assignment = Assignment(values)
        if all(
            assignment.context_values(context) in admissible[context] for context in active
        ):
            survivors.append(assignment)
    return survivors


def third_column_product_counts(assignments: Iterable[Assignment]) -> dict[int, int]:
    """Tally the column-2 value products over a set of assignments.

    With the other five constraints active, every survivor's third-column
    product is +1, which is why the full six-constraint search is empty (the
    third column needs -1).
    """
    counts = {+1: 0, -1: 0}
    col2 = Context("column", 2)
    for assignment in assignments:
        product = 1
        for v in assignment.context_values(col2):
            product *= v
        counts[product] += 1
    return counts
