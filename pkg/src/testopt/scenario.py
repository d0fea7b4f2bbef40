"""Scenario file loading and validation.

Scenarios are JSON documents describing a population of observable cells,
the pressure intensity, optional imputation levels, an optional two-group
section, and an optional ordered path of cell labels.  Unknown keys are
rejected so typos fail loudly, and extended reals use "+inf"/"-inf" string
sentinels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .affirmative import AAScenario
from .distributions import (
    NEG_INF,
    POS_INF,
    Discrete,
    PiecewiseDensity,
    ScoreDistribution,
    Uniform,
)
from .model import ObservableCell, PartyUtility


class ScenarioError(ValueError):
    """Malformed or invalid scenario input (CLI exit code 2)."""


class PreconditionError(ValueError):
    """Structurally valid input that lacks what a command needs (exit code 3)."""


NO_ADVERSE_INFERENCE = "no_adverse_inference"


@dataclass(frozen=True)
class Scenario:
    cells: tuple[ObservableCell, ...]
    delta: float
    imputation: Optional[dict]  # label -> float, or None when absent
    aa: Optional[AAScenario]
    path: Optional[tuple[str, ...]]

    def cell(self, label: str) -> ObservableCell:
        for c in self.cells:
            if c.label == label:
                return c
        raise ScenarioError(f"no cell labeled {label!r} in scenario")

    def imputation_for(self, label: str) -> float:
        if self.imputation is None or label not in self.imputation:
            raise PreconditionError(
                f"cell {label!r} has no imputation level; add an 'imputation' entry"
            )
        return self.imputation[label]


def _require_keys(obj: dict, allowed: set, where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ScenarioError(f"unknown key(s) {sorted(unknown)} in {where}")


def _number(value, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"field {field!r} must be a number, got {value!r}")
    return float(value)


def parse_extended(value, field: str) -> float:
    if value == "+inf":
        return POS_INF
    if value == "-inf":
        return NEG_INF
    return _number(value, field)


def _parse_dist(spec, where: str) -> ScoreDistribution:
    if not isinstance(spec, dict):
        raise ScenarioError(f"{where}.dist must be an object")
    kind = spec.get("type")
    try:
        if kind == "uniform":
            _require_keys(spec, {"type", "lo", "hi"}, f"{where}.dist")
            return Uniform(_number(spec["lo"], "lo"), _number(spec["hi"], "hi"))
        if kind == "discrete":
            _require_keys(spec, {"type", "atoms"}, f"{where}.dist")
            atoms = tuple(
                (_number(a[0], "atom score"), _number(a[1], "atom prob"))
                for a in spec["atoms"]
            )
            return Discrete(atoms)
        if kind == "piecewise":
            _require_keys(spec, {"type", "knots"}, f"{where}.dist")
            knots = tuple(
                (_number(k[0], "knot score"), _number(k[1], "knot density"))
                for k in spec["knots"]
            )
            return PiecewiseDensity(knots)
    except (KeyError, IndexError, TypeError) as exc:
        raise ScenarioError(f"malformed distribution in {where}: {exc}") from exc
    except ValueError as exc:
        raise ScenarioError(f"invalid distribution in {where}: {exc}") from exc
    raise ScenarioError(
        f"{where}.dist.type must be uniform, discrete, or piecewise, got {kind!r}"
    )


def _parse_cell(spec, delta: float, idx: int) -> ObservableCell:
    where = f"cells[{idx}]"
    if not isinstance(spec, dict):
        raise ScenarioError(f"{where} must be an object")
    _require_keys(spec, {"label", "dist", "vc", "wc", "vs", "ws"}, where)
    try:
        return ObservableCell(
            college=PartyUtility(_number(spec["vc"], "vc"), _number(spec["wc"], "wc")),
            society=PartyUtility(_number(spec["vs"], "vs"), _number(spec["ws"], "ws")),
            delta=delta,
            dist=_parse_dist(spec["dist"], where),
            label=str(spec.get("label", f"cell{idx}")),
        )
    except KeyError as exc:
        raise ScenarioError(f"missing field {exc} in {where}") from exc
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"invalid cell {where}: {exc}") from exc


def _parse_aa(spec) -> AAScenario:
    if not isinstance(spec, dict):
        raise ScenarioError("aa section must be an object")
    fields = {"q", "p_r", "p_g", "beta", "c", "delta", "x1_lo", "x1_hi"}
    _require_keys(spec, fields, "aa")
    missing = fields - set(spec)
    if missing:
        raise ScenarioError(f"missing aa field(s) {sorted(missing)}")
    try:
        return AAScenario(**{k: _number(spec[k], f"aa.{k}") for k in fields})
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"invalid aa section: {exc}") from exc


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario file is not valid JSON: {exc}") from exc
    return scenario_from_dict(doc)


def scenario_from_dict(doc) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a JSON object")
    _require_keys(doc, {"cells", "delta", "imputation", "aa", "path"}, "scenario")
    if "cells" not in doc:
        raise ScenarioError("missing field 'cells'")
    if not isinstance(doc["cells"], list) or not doc["cells"]:
        raise ScenarioError("'cells' must be a non-empty list")
    if "delta" not in doc:
        raise ScenarioError("missing field 'delta'")
    delta = _number(doc["delta"], "delta")
    cells = tuple(_parse_cell(c, delta, i) for i, c in enumerate(doc["cells"]))
    labels = [c.label for c in cells]
    if len(set(labels)) != len(labels):
        raise ScenarioError("cell labels must be unique")

    imputation = None
    if "imputation" in doc:
        raw = doc["imputation"]
        if isinstance(raw, dict):
            unknown = set(raw) - set(labels)
            if unknown:
                raise ScenarioError(
                    f"imputation refers to unknown cell(s) {sorted(unknown)}"
                )
            per_cell = dict(raw)
        else:
            per_cell = {lab: raw for lab in labels}
        imputation = {}
        for lab, val in per_cell.items():
            if val == NO_ADVERSE_INFERENCE:
                imputation[lab] = next(
                    c.dist.mean() for c in cells if c.label == lab
                )
            else:
                imputation[lab] = parse_extended(val, f"imputation[{lab}]")

    aa = _parse_aa(doc["aa"]) if "aa" in doc else None

    path = None
    if "path" in doc:
        if not isinstance(doc["path"], list):
            raise ScenarioError("'path' must be a list of cell labels")
        unknown = set(doc["path"]) - set(labels)
        if unknown:
            raise ScenarioError(f"path refers to unknown cell(s) {sorted(unknown)}")
        path = tuple(str(x) for x in doc["path"])

    return Scenario(cells=cells, delta=delta, imputation=imputation, aa=aa, path=path)


def _ext_repr(x: float):
    if x == POS_INF:
        return "+inf"
    if x == NEG_INF:
        return "-inf"
    return x


def scenario_to_dict(s: Scenario) -> dict:
    doc: dict = {"cells": [], "delta": s.delta}
    for c in s.cells:
        dist = c.dist
        if isinstance(dist, Uniform):
            dspec = {"type": "uniform", "lo": dist.lo, "hi": dist.hi}
        elif isinstance(dist, Discrete):
            dspec = {"type": "discrete", "atoms": [list(a) for a in dist.atoms]}
        else:
            dspec = {"type": "piecewise", "knots": [list(k) for k in dist.knots]}
        doc["cells"].append(
            {
                "label": c.label,
                "dist": dspec,
                "vc": c.college.v,
                "wc": c.college.w,
                "vs": c.society.v,
                "ws": c.society.w,
            }
        )
    if s.imputation is not None:
        doc["imputation"] = {k: _ext_repr(v) for k, v in s.imputation.items()}
    if s.aa is not None:
        a = s.aa
        doc["aa"] = {
            "q": a.q,
            "p_r": a.p_r,
            "p_g": a.p_g,
            "beta": a.beta,
            "c": a.c,
            "delta": a.delta,
            "x1_lo": a.x1_lo,
            "x1_hi": a.x1_hi,
        }
    if s.path is not None:
        doc["path"] = list(s.path)
    return doc
