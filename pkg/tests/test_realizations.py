import itertools

import numpy as np
import pytest

from pmsquare.qm import expectation
from pmsquare.realizations import (
    build_realization,
    cell_classes,
    cell_of_derived,
    check_requirements,
    consistent_pair_outcomes,
    derived_born_distribution,
    derived_outcome,
    measurement_classes,
    translate_outcomes,
    translate_outcomes_inverse,
)
from pmsquare.square import build_square

from conftest import random_states


# --- construction ---------------------------------------------------------


def test_realization1_cell_map():
    r = build_realization(1)
    assert r.cell_map[(0, 2)] == ("t(Lzz)",)
    assert r.cell_map[(2, 0)] == ("f(B)",)
    assert set(r.physicals) == {"Lzz", "Lxx", "B"}
    assert r.identifications == ()


def test_realization2_cell_map_and_identifications():
    r = build_realization(2)
    assert r.cell_map[(0, 2)] == ("t(Lzz)", "fp(Bprime)")
    assert r.cell_map[(2, 0)] == ("f(B)", "t(Lzx)")
    assert set(r.physicals) == {"Lzz", "Lxx", "Lzx", "Lxz", "B", "Bprime"}
    assert frozenset({"l(Lzz)", "l(Lzx)"}) in r.identifications
    assert len(r.identifications) == 4


def test_realization3_cell_map():
    r = build_realization(3)
    assert r.cell_map[(2, 2)] == ("h(B)", "hp(Bprime)")
    assert r.cell_map[(0, 0)] == ("Ll_z",)
    assert set(r.physicals) == {"Ll_z", "Lr_z", "Ll_x", "Lr_x", "B", "Bprime"}


def test_build_realization_rejects_bad_index():
    with pytest.raises(ValueError):
        build_realization(4)


def test_physical_projectors_resolve_identity():
    for index in (1, 2, 3):
        for measurement in build_realization(index).physicals.values():
            total = sum(measurement.projectors)
            assert np.max(np.abs(total - np.eye(4))) <= 1e-12
            for p, q in itertools.combinations(measurement.projectors, 2):
                assert np.max(np.abs(p @ q)) <= 1e-12
            for p in measurement.projectors:
                assert np.max(np.abs(p @ p - p)) <= 1e-12


# --- derived outcomes --------------------------------------------------------


def test_derived_outcome_bell_first_outcome_is_positive():
    r = build_realization(1)
    f = r.derived["f(B)"]
    assert derived_outcome(f, 1) == 1
    g = r.derived["g(B)"]
    h = r.derived["h(B)"]
    assert derived_outcome(g, 1) == 1 and derived_outcome(h, 1) == 1


def test_derived_outcome_t_lzz_second_outcome():
    r = build_realization(1)
    assert derived_outcome(r.derived["t(Lzz)"], 2) == -1


def test_derived_outcome_hp_bprime_first_outcome():
    r = build_realization(3)
    assert derived_outcome(r.derived["hp(Bprime)"], 1) == -1


def test_derived_outcome_rejects_unknown_label():
    r = build_realization(1)
    with pytest.raises(ValueError):
        derived_outcome(r.derived["f(B)"], 5)


# --- requirement checks --------------------------------------------------------


def test_requirements_realization1():
    report = check_requirements(build_realization(1))
    assert report.unique_realization_ok
    assert report.multiply_realized_cells == ()
    assert not report.simultaneity_ok
    broken = {context.name for context, _ in report.broken_contexts}
    assert broken == {"col0", "col1", "col2"}


def test_requirements_realization2():
    report = check_requirements(build_realization(2))
    assert not report.unique_realization_ok
    cells = [cell for cell, _ in report.multiply_realized_cells]
    assert cells == [(0, 2), (1, 2), (2, 0), (2, 1), (2, 2)]
    pairs = {ids for _, ids in report.multiply_realized_cells}
    assert pairs == {
        ("t(Lzz)", "fp(Bprime)"),
        ("t(Lxx)", "gp(Bprime)"),
        ("f(B)", "t(Lzx)"),
        ("g(B)", "t(Lxz)"),
        ("h(B)", "hp(Bprime)"),
    }
    assert report.simultaneity_ok
    assert report.broken_contexts == ()


def test_requirements_realization3():
    report = check_requirements(build_realization(3))
    assert not report.unique_realization_ok
    assert [cell for cell, _ in report.multiply_realized_cells] == [(2, 2)]
    assert not report.simultaneity_ok
    pairs = {pair for _, pair in report.broken_contexts}
    assert ("Lr_z", "fp(Bprime)") in pairs
    broken = {context.name for context, _ in report.broken_contexts}
    assert broken == {"row0", "row1", "col0", "col1"}


def test_realization1_simultaneity_is_three_parent_cliques():
    r = build_realization(1)
    by_parent: dict[str, set[str]] = {}
    for d in r.derived.values():
        by_parent.setdefault(d.parent, set()).add(d.id)
    assert sorted(len(group) for group in by_parent.values()) == [3, 3, 3]
    classes = measurement_classes(r)
    assert all(len(cls) == 1 for cls in classes.values())


def test_cell_classes_merge_identified_measurements():
    r = build_realization(2)
    assert cell_classes(r, (0, 0)) == (("l(Lzz)", "l(Lzx)"),)
    assert cell_classes(r, (0, 2)) == (("t(Lzz)",), ("fp(Bprime)",))


def test_cell_of_derived_is_unique():
    for index in (1, 2, 3):
        r = build_realization(index)
        for cell, ids in r.cell_map.items():
            for did in ids:
                assert cell_of_derived(r, did) == cell


# --- statistical faithfulness ------------------------------------------------


def test_derived_measurements_are_statistically_faithful():
    # every derived measurement must reproduce the Born distribution of the
    # grid operator it realizes, eigenprojectors (I +/- O)/2 as the oracle
    sq = build_square()
    states = random_states(100, seed=20260810)
    for index in (1, 2, 3):
        r = build_realization(index)
        for cell, ids in r.cell_map.items():
            op = sq.operator(cell)
            plus = (np.eye(4) + op) / 2.0
            for did in ids:
                for state in states:
                    dist = derived_born_distribution(r, did, state)
                    assert dist[1] == pytest.approx(expectation(state, plus), abs=1e-12)
                    assert dist[1] + dist[-1] == pytest.approx(1.0, abs=1e-12)


def test_identified_pairs_agree_on_every_consistent_tuple():
    r = build_realization(2)
    for pair_outcomes in consistent_pair_outcomes():
        for group in r.identifications:
            values = {
                r.derived[did].outcome_map[pair_outcomes[r.derived[did].parent]]
                for did in group
            }
            assert len(values) == 1


# --- outcome translation --------------------------------------------------------


def test_translate_worked_example():
    sides = translate_outcomes({"Lzz": 1, "Lxx": 4, "Lzx": 2, "Lxz": 2})
    assert sides == {"Ll_z": 1, "Lr_z": 1, "Ll_x": -1, "Lr_x": -1}


def test_translate_all_first_outcomes():
    assert translate_outcomes({"Lzz": 1, "Lxx": 1, "Lzx": 1, "Lxz": 1}) == {
        "Ll_z": 1,
        "Lr_z": 1,
        "Ll_x": 1,
        "Lr_x": 1,
    }


def test_translate_all_fourth_outcomes():
    assert translate_outcomes({"Lzz": 4, "Lxx": 4, "Lzx": 4, "Lxz": 4}) == {
        "Ll_z": -1,
        "Lr_z": -1,
        "Ll_x": -1,
        "Lr_x": -1,
    }


def test_translate_round_trips_on_all_consistent_tuples():
    tuples = consistent_pair_outcomes()
    assert len(tuples) == 16
    for pair_outcomes in tuples:
        sides = translate_outcomes(pair_outcomes)
        assert translate_outcomes_inverse(sides) == pair_outcomes
    for values in itertools.product((1, -1), repeat=4):
        sides = dict(zip(("Ll_z", "Lr_z", "Ll_x", "Lr_x"), values))
        assert translate_outcomes(translate_outcomes_inverse(sides)) == sides


def test_translate_rejects_inconsistent_tuple_naming_the_pair():
    # Lzz=1 puts the left-z wing at +1, Lzx=3 puts it at -1
    with pytest.raises(ValueError, match="Lzx"):
        translate_outcomes({"Lzz": 1, "Lxx": 1, "Lzx": 3, "Lxz": 1})


def test_translate_validates_inputs():
    with pytest.raises(ValueError):
        translate_outcomes({"Lzz": 1, "Lxx": 1, "Lzx": 1})
    with pytest.raises(ValueError):
        translate_outcomes({"Lzz": 0, "Lxx": 1, "Lzx": 1, "Lxz": 1})
    with pytest.raises(ValueError):
        translate_outcomes_inverse({"Ll_z": 2, "Lr_z": 1, "Ll_x": 1, "Lr_x": 1})


def test_exactly_sixteen_consistent_tuples_exist():
    consistent = 0
    for outcomes in itertools.product((1, 2, 3, 4), repeat=4):
        candidate = dict(zip(("Lzz", "Lxx", "Lzx", "Lxz"), outcomes))
        try:
            translate_outcomes(candidate)
        except ValueError:
            continue
        consistent += 1
    assert consistent == 16
