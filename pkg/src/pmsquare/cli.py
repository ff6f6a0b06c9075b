"""Command-line front end.

Subcommands: verify | contradiction | realization | model | sample | ch.
Each run emits one report (human-readable by default, canonical JSON with
--json) and exits 0 when the report passes, 1 when a verification failed,
2 on usage errors, and 3 when the requested model construction is
infeasible for the given state.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

import numpy as np

from . import hvmodels
from .errors import InfeasibleModelError, InternalConsistencyError
from .qm import apply, ket
from .realizations import build_realization, check_requirements
from .reports import Report, render_json, render_text, validate_envelope
from .square import (
    CONTEXTS,
    NAMED_STATES,
    build_square,
    commutation_relation,
    context_cells,
    context_from_name,
    context_operator_product,
    eigentable,
    search_assignments,
    third_column_product_counts,
)

#: Expected requirement verdicts per realization: (unique ok, simultaneity ok).
_EXPECTED_VERDICTS = {1: (True, False), 2: (False, True), 3: (False, False)}


class UsageError(ValueError):
    pass


# --- state specification -----------------------------------------------------


def resolve_state(spec: str, *, normalize: bool = False) -> tuple[np.ndarray, dict[str, Any]]:
    """Resolve a named state or a state file into a ket plus an input echo."""
    if spec == "chsh-max":
        return hvmodels.chsh_max_state(), {"name": spec}
    if spec in NAMED_STATES:
        return NAMED_STATES[spec].copy(), {"name": spec}
    path = Path(spec)
    if not path.exists():
        raise UsageError(
            f"{spec!r} is neither a known state name nor an existing file; "
            f"known names: chsh-max, {', '.join(sorted(NAMED_STATES))}"
        )
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read state file {spec!r}: {exc}") from None
    if not isinstance(document, dict):
        raise UsageError(f"state file {spec!r} must hold an object")
    if "name" in document:
        return resolve_state(str(document["name"]), normalize=normalize)
    if "amplitudes" not in document:
        raise UsageError(f"state file {spec!r} needs a 'name' or an 'amplitudes' field")
    pairs = document["amplitudes"]
    if not isinstance(pairs, list) or len(pairs) != 4:
        raise UsageError("'amplitudes' must list four [re, im] pairs")
    try:
        components = [complex(float(re), float(im)) for re, im in pairs]
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad amplitude entry: {exc}") from None
    try:
        state = ket(components, normalize=normalize)
    except ValueError as exc:
        raise UsageError(f"bad state in {spec!r}: {exc} (did you mean --normalize?)") from None
    echo = {
        "amplitudes": [[float(a.real), float(a.imag)] for a in components],
        "normalized": bool(normalize),
    }
    return state, echo


# --- document helpers ---------------------------------------------------------


def _distribution_doc(dist: dict[int, float]) -> dict[str, float]:
    return {str(outcome): float(p) for outcome, p in dist.items()}


def _counts_doc(counts: dict[int, int]) -> dict[str, int]:
    return {str(outcome): int(n) for outcome, n in counts.items()}


def _ch_doc(report: hvmodels.CHReport) -> dict[str, Any]:
    return {
        "correlators": {f"{s}{t}": float(v) for (s, t), v in report.correlators.items()},
        "chsh_values": [float(v) for v in report.chsh_values],
        "max_abs": float(report.max_abs),
        "violated": bool(report.violated),
    }


def _joint_doc(joint: dict[tuple[int, int, int, int], float]) -> dict[str, float]:
    return {",".join(f"{v:+d}" for v in key): float(p) for key, p in joint.items()}


def _fine_doc(fine: hvmodels.FineResult) -> dict[str, Any]:
    doc: dict[str, Any] = {"status": fine.status, "ch": _ch_doc(fine.ch)}
    if fine.joint is not None:
        doc["joint"] = _joint_doc(fine.joint)
    if fine.certificate is not None:
        doc["certificate"] = [float(v) for v in fine.certificate]
    return doc


def _context_witness_doc(witness: hvmodels.ContextWitness) -> dict[str, Any]:
    return {
        "context": witness.context.name,
        "measurements": list(witness.measurement_ids),
        "state_index": witness.state_index,
        "outcomes": {mid: int(o) for mid, o in sorted(witness.outcomes.items())},
        "triple": [int(v) for v in witness.triple],
        "probability": float(witness.probability),
    }


def _cell_witness_doc(witness: hvmodels.CellWitness) -> dict[str, Any]:
    return {
        "cell": [witness.cell[0], witness.cell[1]],
        "measurements": list(witness.measurement_ids),
        "state_index": witness.state_index,
        "outcomes": {mid: int(o) for mid, o in sorted(witness.outcomes.items())},
        "values": [int(v) for v in witness.values],
        "probability": float(witness.probability),
    }


def _statistics_doc(stats: hvmodels.StatisticsReport) -> dict[str, Any]:
    return {
        "measurement_deviations": {k: float(v) for k, v in stats.measurement_deviations.items()},
        "pair_joint_deviations": {k: float(v) for k, v in stats.pair_joint_deviations.items()},
        "max_abs_deviation": float(stats.max_abs_deviation),
        "probability_sum": float(stats.probability_sum),
        "tolerance": float(stats.tolerance),
        "passed": bool(stats.passed),
    }


def _build_model(index: int, state: np.ndarray) -> hvmodels.HVModel:
    if index == 1:
        return hvmodels.build_model1(state)
    return hvmodels.build_model23(state, realization_index=index)


# --- commands ------------------------------------------------------------------


def cmd_verify() -> Report:
    square = build_square()
    results: dict[str, Any] = {}
    try:
        pairs = commutation_relation(square)
        results["commutation"] = {
            "pairs_checked": len(pairs),
            "pairs": [
                {"cells": [list(c1), list(c2)], "commute": bool(flag)}
                for (c1, c2), flag in pairs.items()
            ],
        }
        tables_doc: dict[str, Any] = {}
        eigenvector_checks = 0
        for context in CONTEXTS:
            table = eigentable(context)
            ops = [square.operator(cell) for cell in context_cells(context)]
            eigen_residual = 0.0
            ortho_residual = 0.0
            entries_doc = []
            for i, entry in enumerate(table.entries):
                for op, value in zip(ops, entry.values):
                    eigen_residual = max(
                        eigen_residual,
                        float(np.max(np.abs(apply(op, entry.vector) - value * entry.vector))),
                    )
                for j, other in enumerate(table.entries):
                    target = 1.0 if i == j else 0.0
                    ortho_residual = max(
                        ortho_residual,
                        abs(abs(np.vdot(entry.vector, other.vector)) - target),
                    )
                entries_doc.append({"label": entry.label, "values": list(entry.values)})
                eigenvector_checks += 1
            tables_doc[context.name] = {
                "entries": entries_doc,
                "max_eigen_residual": eigen_residual,
                "max_orthonormality_residual": ortho_residual,
            }
        results["eigentables"] = tables_doc
        results["context_products"] = {
            context.name: context_operator_product(square, context) for context in CONTEXTS
        }
        results["checks"] = {
            "commutation_pairs": len(pairs),
            "eigenvector_checks": eigenvector_checks,
            "product_signs": len(CONTEXTS),
        }
        passed = True
    except InternalConsistencyError as exc:
        results["error"] = str(exc)
        passed = False
    return Report("verify", {}, results, passed)


def cmd_contradiction(constraint_names: list[str] | None) -> Report:
    if constraint_names is None:
        active = list(CONTEXTS)
        echo = ["all"]
    else:
        try:
            active = [context_from_name(name) for name in constraint_names]
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        echo = list(constraint_names)
    survivors = search_assignments(active)
    results: dict[str, Any] = {
        "active_constraints": [c.name for c in active],
        "count": len(survivors),
        "survivors": [list(a.values) for a in survivors],
    }
    col2 = context_from_name("col2")
    if col2 not in active:
        results["third_column_products"] = {
            f"{sign:+d}": count
            for sign, count in third_column_product_counts(survivors).items()
        }
    full_set = len(active) == len(CONTEXTS) and set(active) == set(CONTEXTS)
    if full_set:
        # the parity view of the emptiness: the other five constraints force
        # the third-column product to +1 while column 2 demands -1
        relaxed = search_assignments([c for c in CONTEXTS if c != col2])
        counts = third_column_product_counts(relaxed)
        results["parity"] = {
            "without_col2_count": len(relaxed),
            "third_column_products": {f"{sign:+d}": n for sign, n in counts.items()},
            "required_by_col2": -1,
        }
        passed = len(survivors) == 0
    else:
        passed = True
    return Report("contradiction", {"constraints": echo}, results, passed)


def cmd_realization(index: int) -> Report:
    realization = build_realization(index)
    report = check_requirements(realization)
    expected_unique, expected_simultaneous = _EXPECTED_VERDICTS[index]
    results = {
        "cell_map": {
            f"{cell[0]},{cell[1]}": list(ids)
            for cell, ids in sorted(realization.cell_map.items())
        },
        "physical_measurements": sorted(realization.physicals),
        "identifications": [sorted(group) for group in realization.identifications],
        "requirements": {
            "unique_realization_ok": report.unique_realization_ok,
            "multiply_realized_cells": [
                {"cell": list(cell), "measurements": list(ids)}
                for cell, ids in report.multiply_realized_cells
            ],
            "simultaneity_ok": report.simultaneity_ok,
            "broken_contexts": [
                {"context": context.name, "pair": list(pair)}
                for context, pair in report.broken_contexts
            ],
        },
        "expected": {
            "unique_realization_ok": expected_unique,
            "simultaneity_ok": expected_simultaneous,
        },
    }
    passed = (
        report.unique_realization_ok == expected_unique
        and report.simultaneity_ok == expected_simultaneous
    )
    return Report("realization", {"index": index}, results, passed)


def cmd_model(index: int, state_spec: str, *, normalize: bool, max_witnesses: int) -> tuple[Report, bool]:
    state, echo = resolve_state(state_spec, normalize=normalize)
    inputs = {"index": index, "state": echo, "max_witnesses": max_witnesses}
    try:
        model = _build_model(index, state)
    except InfeasibleModelError as exc:
        fine = exc.fine_result
        results = {"error": str(exc), "fine": _fine_doc(fine), "ch": _ch_doc(fine.ch)}
        return Report("model", inputs, results, False), True
    realization = build_realization(index)
    stats = hvmodels.reproduce_statistics(model, state)
    noncontextual = hvmodels.audit_noncontextuality(model, realization)
    witnesses = hvmodels.violation_witnesses(model, realization)

    # cap the witness lists per context/cell so each group stays represented
    context_docs: list[dict[str, Any]] = []
    context_kept: dict[str, int] = {}
    for witness in witnesses.context_witnesses:
        kept = context_kept.get(witness.context.name, 0)
        if kept < max_witnesses:
            context_docs.append(_context_witness_doc(witness))
            context_kept[witness.context.name] = kept + 1
    cell_docs: list[dict[str, Any]] = []
    cell_kept: dict[tuple[int, int], int] = {}
    for witness in witnesses.cell_witnesses:
        kept = cell_kept.get(witness.cell, 0)
        if kept < max_witnesses:
            cell_docs.append(_cell_witness_doc(witness))
            cell_kept[witness.cell] = kept + 1
    results: dict[str, Any] = {
        "realization": index,
        "hidden_states": len(model.states),
        "probability_sum": float(sum(s.probability for s in model.states)),
        "statistics": _statistics_doc(stats),
        "noncontextual": noncontextual,
        "witnesses": {
            "context_count": len(witnesses.context_witnesses),
            "cell_count": len(witnesses.cell_witnesses),
            "simultaneous_violation_count": len(witnesses.simultaneous_violations),
            "simultaneous_choices_checked": witnesses.simultaneous_choices_checked,
            "context": context_docs,
            "context_truncated": len(context_docs) < len(witnesses.context_witnesses),
            "cell": cell_docs,
            "cell_truncated": len(cell_docs) < len(witnesses.cell_witnesses),
        },
    }
    if index in (2, 3):
        fine = hvmodels.fine_joint(state)
        results["fine"] = _fine_doc(fine)
        results["ch"] = _ch_doc(fine.ch)
    passed = (
        stats.passed and noncontextual and not witnesses.simultaneous_violations
    )
    return Report("model", inputs, results, passed), False


def cmd_sample(index: int, state_spec: str, shots: int, seed: int, *, normalize: bool) -> tuple[Report, bool]:
    state, echo = resolve_state(state_spec, normalize=normalize)
    inputs = {"index": index, "state": echo, "shots": shots, "seed": seed}
    try:
        model = _build_model(index, state)
    except InfeasibleModelError as exc:
        fine = exc.fine_result
        results = {"error": str(exc), "fine": _fine_doc(fine), "ch": _ch_doc(fine.ch)}
        return Report("sample", inputs, results, False), True
    sample = hvmodels.sample_model(model, state, shots, seed)
    results = {
        "realization": index,
        "rng": "numpy-philox",
        "shots": sample.shots,
        "seed": sample.seed,
        "tv_bound": float(sample.tv_bound),
        "measurements": {
            mid: {
                "counts": _counts_doc(ms.counts),
                "frequencies": _distribution_doc(ms.frequencies),
                "born": _distribution_doc(ms.born),
                "tv_distance": float(ms.tv_distance),
            }
            for mid, ms in sample.measurements.items()
        },
    }
    return Report("sample", inputs, results, sample.passed), False


def cmd_ch(state_spec: str, *, normalize: bool) -> Report:
    state, echo = resolve_state(state_spec, normalize=normalize)
    report = hvmodels.ch_report(state)
    return Report("ch", {"state": echo}, _ch_doc(report), True)


# --- argument parsing -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pmsquare",
        description=(
            "Verify the two-qubit operator square, search for consistent value "
            "assignments, inspect the three photon-pair realizations, and build "
            "and test their hidden-variable models."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--json", action="store_true", help="emit the canonical JSON report")
        p.add_argument(
            "--strict",
            action="store_true",
            help="self-check the report envelope before emitting it",
        )

    p = sub.add_parser("verify", help="check commutation structure, eigentables, products")
    add_common(p)

    p = sub.add_parser("contradiction", help="enumerate +/-1 assignments under constraints")
    p.add_argument(
        "--constraints",
        help="comma-separated contexts (r0..r2,c0..c2 or row0..col2); default: all six",
    )
    add_common(p)

    p = sub.add_parser("realization", help="requirement report for a realization")
    p.add_argument("index", type=int, choices=(1, 2, 3))
    add_common(p)

    p = sub.add_parser("model", help="build a hidden-variable model and test it")
    p.add_argument("index", type=int, choices=(1, 2, 3))
    p.add_argument("--state", required=True, help="state name or state file")
    p.add_argument("--normalize", action="store_true", help="rescale explicit amplitudes")
    p.add_argument("--max-witnesses", type=int, default=12, help="witness list cap per kind")
    add_common(p)

    p = sub.add_parser("sample", help="seeded Monte Carlo sampling of a model")
    p.add_argument("index", type=int, choices=(1, 2, 3))
    p.add_argument("--state", required=True, help="state name or state file")
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--normalize", action="store_true", help="rescale explicit amplitudes")
    add_common(p)

    p = sub.add_parser("ch", help="CHSH correlator report for a state")
    p.add_argument("--state", required=True, help="state name or state file")
    p.add_argument("--normalize", action="store_true", help="rescale explicit amplitudes")
    add_common(p)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    infeasible = False
    try:
        if args.command == "verify":
            report = cmd_verify()
        elif args.command == "contradiction":
            names = None
            if args.constraints is not None:
                names = [part.strip() for part in args.constraints.split(",") if part.strip()]
                if not names:
                    raise UsageError("--constraints must name at least one context")
            report = cmd_contradiction(names)
        elif args.command == "realization":
            report = cmd_realization(args.index)
        elif args.command == "model":
            if args.max_witnesses < 0:
                raise UsageError("--max-witnesses must be nonnegative")
            report, infeasible = cmd_model(
                args.index,
                args.state,
                normalize=args.normalize,
                max_witnesses=args.max_witnesses,
            )
        elif args.command == "sample":
            if args.shots <= 0:
                raise UsageError("--shots must be positive")
            report, infeasible = cmd_sample(
                args.index, args.state, args.shots, args.seed, normalize=args.normalize
            )
        elif args.command == "ch":
            report = cmd_ch(args.state, normalize=args.normalize)
        else:  # pragma: no cover - argparse enforces the choices
            raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"pmsquare: {exc}", file=sys.stderr)
        return 2

    if args.strict:
        validate_envelope(report.to_document())
    print(render_json(report) if args.json else render_text(report))
    if report.passed:
        return 0
    return 3 if infeasible else 1


if __name__ == "__main__":
    sys.exit(main())
