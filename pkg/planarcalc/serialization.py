"""
JSON and CSV documents for series, fields, effective actions and trees.

Series document:

    {"alphabet": n, "max_degree": D, "scalar": "rational" | "float64",
     "variable": "x" | "y" | "phi", "role": "moments" | ...,
     "coeffs": [{"word": [i₁, …], "value": "p/q" | number}, …]}

Words are written sorted by (degree, lexicographic) and rationals as reduced
"p/q" strings, so writing the same value twice gives identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from planarcalc.effective_action import CovarianceMatrix, EffectiveAction
from planarcalc.exceptions import DocumentError, PreconditionError
from planarcalc.reports import format_scalar
from planarcalc.series import (
    RATIONAL,
    SCALAR_KINDS,
    VARIABLES,
    Field,
    Scalar,
    Series,
    make_series,
)
from planarcalc.trees import AdmissibleTree

ROLES = ("moments", "cumulants", "effective_action")


# ── scalars ────────────────────────────────────────────────────────────────


def parse_scalar(raw: object, kind: str) -> Scalar:
    if kind == RATIONAL:
        if isinstance(raw, bool) or not isinstance(raw, (str, int)):
            raise DocumentError(f"rational values are 'p/q' strings or integers, got {raw!r}")
        try:
            return Fraction(raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise DocumentError(f"invalid rational value {raw!r}") from exc
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise DocumentError(f"float64 values are JSON numbers, got {raw!r}")
    return float(raw)


def _require(doc: Any, key: str, kind: type | tuple[type, ...]) -> Any:
    if not isinstance(doc, dict):
        raise DocumentError(f"expected a JSON object, got {type(doc).__name__}")
    if key not in doc:
        raise DocumentError(f"missing key {key!r}")
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, kind):
        raise DocumentError(f"key {key!r} has the wrong type: {value!r}")
    return value


# ── series and fields ──────────────────────────────────────────────────────


def series_to_dict(f: Series, role: str | None = None) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "alphabet": f.alphabet.size,
        "max_degree": f.max_degree,
        "scalar": f.scalar,
        "variable": f.variable,
    }
    if role is not None:
        doc["role"] = role
    doc["coeffs"] = [{"word": list(w), "value": format_scalar(v)} for w, v in f.items()]
    return doc


def series_from_dict(doc: Any) -> Series:
    alphabet = _require(doc, "alphabet", int)
    max_degree = _require(doc, "max_degree", int)
    scalar = doc.get("scalar", RATIONAL)
    if scalar not in SCALAR_KINDS:
        raise DocumentError(f"unknown scalar kind {scalar!r}")
    variable = doc.get("variable", "x")
    if variable not in VARIABLES:
        raise DocumentError(f"unknown variable {variable!r}")
    role = doc.get("role")
    if role is not None and role not in ROLES:
        raise DocumentError(f"unknown role {role!r}")
    coeffs = _require(doc, "coeffs", list)

    entries = []
    for entry in coeffs:
        word = _require(entry, "word", list)
        if "value" not in entry:
            raise DocumentError("coefficient entry without a value")
        entries.append((word, parse_scalar(entry["value"], scalar)))
    try:
        return make_series(entries, alphabet, max_degree, scalar=scalar, variable=variable)
    except PreconditionError as exc:
        raise DocumentError(f"invalid series document: {exc}") from exc


def series_role(doc: dict[str, Any]) -> str | None:
    return doc.get("role")


def field_to_dict(g: Field) -> dict[str, Any]:
    return {"components": [series_to_dict(c) for c in g]}


def field_from_dict(doc: Any) -> Field:
    components = _require(doc, "components", list)
    try:
        return Field(tuple(series_from_dict(c) for c in components))
    except PreconditionError as exc:
        raise DocumentError(f"invalid field document: {exc}") from exc


# ── effective action ───────────────────────────────────────────────────────


def effective_action_to_dict(action: EffectiveAction) -> dict[str, Any]:
    doc = series_to_dict(action.series, role="effective_action")
    doc["covariance"] = action.covariance.to_lists()
    return doc


def effective_action_from_dict(doc: Any) -> tuple[Series, CovarianceMatrix]:
    """The stored L series and covariance block."""
    series = series_from_dict(doc)
    rows = _require(doc, "covariance", list)
    n = series.alphabet.size
    if len(rows) != n or any(not isinstance(row, list) or len(row) != n for row in rows):
        raise DocumentError(f"covariance must be a {n}x{n} matrix")
    entries = tuple(tuple(parse_scalar(v, series.scalar) for v in row) for row in rows)
    return series, CovarianceMatrix(entries, series.scalar)


def l_table_csv(action: EffectiveAction) -> str:
    """The ℓ coefficients as CSV with header "word,value"; words are space-joined letters."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["word", "value"])
    for word, value in action.series.items():
        writer.writerow([" ".join(str(i) for i in word), format_scalar(value)])
    return buffer.getvalue()


# ── trees ──────────────────────────────────────────────────────────────────


def tree_to_dict(tree: AdmissibleTree, word: tuple[int, ...] | None = None) -> dict[str, Any]:
    labels = list(word) if word is not None else list(range(1, tree.marks + 1))
    if len(labels) != tree.marks:
        raise PreconditionError(f"need {tree.marks} labels, got {len(labels)}")
    return {
        "marks": tree.marks,
        "root_label": labels[0],
        "leaf_labels": labels[1:],
        "structure": tree.to_nested(),
    }


def tree_from_dict(doc: Any) -> tuple[AdmissibleTree, tuple[int, ...]]:
    """The tree and its labels (root label first)."""
    marks = _require(doc, "marks", int)
    root = _require(doc, "root_label", int)
    leaves = _require(doc, "leaf_labels", list)
    structure = _require(doc, "structure", list)
    try:
        tree = AdmissibleTree.from_nested(structure)
    except PreconditionError as exc:
        raise DocumentError(f"invalid tree structure: {exc}") from exc
    if tree.marks != marks or len(leaves) != marks - 1:
        raise DocumentError(f"tree document declares {marks} marks but has {tree.marks}")
    return tree, (root, *leaves)


# ── files ──────────────────────────────────────────────────────────────────


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def write_json(doc: Any, path: str | Path) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


def read_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path} is not valid JSON: {exc}") from exc

