"""JSON scenario files.

Complex entries are written as ``[re, im]`` pairs (a bare number means a real
entry); matrices are lists of rows. Every field is validated at parse time
and errors carry a JSON path such as ``$.gambles[0][1][1]``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .credal.coherence import Assessment, Strictness
from .errors import NotHermitian, ParseError, QDesireError, ValidationError
from .linalg import TOL_HERM, UnitaryMap, validate_hermitian
from .measurement import make_measurement, validate_density

SCHEMA_VERSION = 1

DEFAULT_TOLERANCES = {
    "tol_herm": TOL_HERM,
    "coherence": 1e-9,
    "membership": 1e-8,
    "independence": 1e-8,
}

MODEL_FIELDS = ("dim", "classical", "assessments", "extreme_points")
TOP_FIELDS = ("schema", "description", "dims", "models", "gambles", "state", "states",
              "measurement", "indices", "unitary", "keep", "trials", "seed", "tolerances",
              "expect") + MODEL_FIELDS


@dataclass
class ModelBlock:
    dim: int | None = None
    classical: bool = False
    assessments: list = field(default_factory=list)
    extreme_points: list | None = None


@dataclass
class ScenarioFile:
    schema: int = SCHEMA_VERSION
    description: str | None = None
    model: ModelBlock = field(default_factory=ModelBlock)
    dims: tuple | None = None
    models: list | None = None
    gambles: list | None = None
    state: np.ndarray | None = None
    states: list | None = None
    measurement: list | None = None
    indices: list | None = None
    unitary: UnitaryMap | None = None
    keep: str | None = None
    trials: int | None = None
    seed: int | None = None
    tolerances: dict = field(default_factory=dict)
    expect: dict | None = None
    file_tolerances: dict = field(default_factory=dict)

    def tolerance(self, name: str) -> float:
        return self.tolerances.get(name, DEFAULT_TOLERANCES[name])


# --------------------------------------------------------------------------
# parsing helpers


def _number(x, path) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(path, f"expected a number, got {json.dumps(x)}")
    v = float(x)
    if not math.isfinite(v):
        raise ParseError(path, "number is not finite")
    return v


def _complex(x, path) -> complex:
    if isinstance(x, list):
        if len(x) != 2:
            raise ParseError(path, "complex entries are [re, im] pairs")
        return complex(_number(x[0], f"{path}[0]"), _number(x[1], f"{path}[1]"))
    return complex(_number(x, path), 0.0)


def _matrix(x, path) -> np.ndarray:
    if not isinstance(x, list) or not x:
        raise ParseError(path, "expected a non-empty list of rows")
    rows = []
    for i, row in enumerate(x):
        if not isinstance(row, list):
            raise ParseError(f"{path}[{i}]", "expected a row list")
        rows.append([_complex(v, f"{path}[{i}][{j}]") for j, v in enumerate(row)])
    n = len(rows)
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ValidationError(f"{path}[{i}]", f"row has {len(row)} entries; matrix must be {n}x{n}")
    return np.array(rows, dtype=complex)


def _hermitian(x, path, tol_herm) -> np.ndarray:
    m = _matrix(x, path)
    try:
        return validate_hermitian(m, tol=tol_herm)
    except NotHermitian as exc:
        raise ValidationError(path, f"{exc} (tol_herm={tol_herm:g})") from None
    except QDesireError as exc:
        raise ValidationError(path, str(exc)) from None


def _state(x, path, tol_herm) -> np.ndarray:
    h = _hermitian(x, path, tol_herm)
    try:
        return validate_density(h)
    except QDesireError as exc:
        raise ValidationError(path, str(exc)) from None


def _list(x, path) -> list:
    if not isinstance(x, list):
        raise ParseError(path, "expected a list")
    return x


def _int(x, path, lo=None) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(path, f"expected an integer, got {json.dumps(x)}")
    if lo is not None and x < lo:
        raise ValidationError(path, f"must be at least {lo}")
    return x


def _object(x, path, allowed) -> dict:
    if not isinstance(x, dict):
        raise ParseError(path, "expected an object")
    for k in x:
        if k not in allowed:
            raise ValidationError(f"{path}.{k}", "unknown field")
    return x


def _model(obj, path, tol_herm) -> ModelBlock:
    block = ModelBlock()
    if "dim" in obj:
        block.dim = _int(obj["dim"], f"{path}.dim", 1)
    if "classical" in obj:
        if not isinstance(obj["classical"], bool):
            raise ParseError(f"{path}.classical", "expected true or false")
        block.classical = obj["classical"]
    if "assessments" in obj and "extreme_points" in obj:
        raise ValidationError(path, "give either assessments or extreme_points, not both")
    for i, a in enumerate(_list(obj.get("assessments", []), f"{path}.assessments")):
        p = f"{path}.assessments[{i}]"
        _object(a, p, ("gamble", "strictness"))
        if "gamble" not in a:
            raise ValidationError(p, "missing gamble")
        st = a.get("strictness", "strict")
        if st not in ("strict", "border"):
            raise ValidationError(f"{p}.strictness", "must be 'strict' or 'border'")
        block.assessments.append(Assessment(_hermitian(a["gamble"], f"{p}.gamble", tol_herm), Strictness(st)))
    if "extreme_points" in obj:
        pts = _list(obj["extreme_points"], f"{path}.extreme_points")
        if not pts:
            raise ValidationError(f"{path}.extreme_points", "needs at least one state")
        block.extreme_points = [_state(p, f"{path}.extreme_points[{i}]", tol_herm) for i, p in enumerate(pts)]
    sizes = {a.gamble.shape[0] for a in block.assessments}
    if block.extreme_points:
        sizes |= {p.shape[0] for p in block.extreme_points}
    if block.dim is not None:
        sizes.add(block.dim)
    if len(sizes) > 1:
        raise ValidationError(path, f"inconsistent dimensions {sorted(sizes)}")
    if sizes:
        block.dim = sizes.pop()
    return block


def parse_scenario(text: str, overrides: dict | None = None) -> ScenarioFile:
    """Parse and validate scenario JSON text.

    Raises
    ------
    ParseError
        malformed JSON or wrongly typed values.
    ValidationError
        values that parse but violate a domain rule, or unknown fields.

    ``overrides`` replaces tolerances from the file (e.g. command-line flags).
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("$", f"invalid JSON: {exc.msg} at line {exc.lineno} column {exc.colno}") from None
    return scenario_from_dict(raw, overrides)


def scenario_from_dict(raw: Any, overrides: dict | None = None) -> ScenarioFile:
    _object(raw, "$", TOP_FIELDS)
    sc = ScenarioFile()
    sc.schema = _int(raw.get("schema", SCHEMA_VERSION), "$.schema")
    if sc.schema != SCHEMA_VERSION:
        raise ValidationError("$.schema", f"unsupported schema version {sc.schema}")
    if "tolerances" in raw:
        tols = _object(raw["tolerances"], "$.tolerances", tuple(DEFAULT_TOLERANCES))
        for k, v in tols.items():
            val = _number(v, f"$.tolerances.{k}")
            if val <= 0:
                raise ValidationError(f"$.tolerances.{k}", "must be positive")
            sc.tolerances[k] = val
    file_tolerances = dict(sc.tolerances)
    for k, v in (overrides or {}).items():
        if k not in DEFAULT_TOLERANCES:
            raise ValidationError(f"--tol {k}", "unknown tolerance name")
        sc.tolerances[k] = float(v)
    th = sc.tolerance("tol_herm")
    if "description" in raw:
        if not isinstance(raw["description"], str):
            raise ParseError("$.description", "expected a string")
        sc.description = raw["description"]
    sc.model = _model({k: raw[k] for k in MODEL_FIELDS if k in raw}, "$", th)
    if "dims" in raw:
        d = _list(raw["dims"], "$.dims")
        if len(d) != 2:
            raise ValidationError("$.dims", "expected two subsystem dimensions")
        sc.dims = (_int(d[0], "$.dims[0]", 1), _int(d[1], "$.dims[1]", 1))
    if "models" in raw:
        sc.models = []
        for i, m in enumerate(_list(raw["models"], "$.models")):
            _object(m, f"$.models[{i}]", MODEL_FIELDS)
            sc.models.append(_model(m, f"$.models[{i}]", th))
    if "gambles" in raw:
        sc.gambles = [_hermitian(g, f"$.gambles[{i}]", th) for i, g in enumerate(_list(raw["gambles"], "$.gambles"))]
    if "state" in raw:
        sc.state = _state(raw["state"], "$.state", th)
    if "states" in raw:
        sc.states = [_state(s, f"$.states[{i}]", th) for i, s in enumerate(_list(raw["states"], "$.states"))]
    if "measurement" in raw:
        mats = [_hermitian(p, f"$.measurement[{i}]", th)
                for i, p in enumerate(_list(raw["measurement"], "$.measurement"))]
        try:
            make_measurement(mats)
        except QDesireError as exc:
            raise ValidationError("$.measurement", str(exc)) from None
        sc.measurement = mats
    if "indices" in raw:
        sc.indices = [_int(v, f"$.indices[{i}]", 0) for i, v in enumerate(_list(raw["indices"], "$.indices"))]
    if "unitary" in raw:
        u = _object(raw["unitary"], "$.unitary", ("matrix", "antiunitary"))
        if "matrix" not in u:
            raise ValidationError("$.unitary", "missing matrix")
        mat = _matrix(u["matrix"], "$.unitary.matrix")
        anti = u.get("antiunitary", False)
        if not isinstance(anti, bool):
            raise ParseError("$.unitary.antiunitary", "expected true or false")
        try:
            sc.unitary = UnitaryMap(mat, anti)
        except (QDesireError, ValueError) as exc:
            raise ValidationError("$.unitary.matrix", str(exc)) from None
    if "keep" in raw:
        if raw["keep"] not in ("A", "B"):
            raise ValidationError("$.keep", "must be 'A' or 'B'")
        sc.keep = raw["keep"]
    if "trials" in raw:
        sc.trials = _int(raw["trials"], "$.trials", 1)
    if "seed" in raw:
        sc.seed = _int(raw["seed"], "$.seed", 0)
        if sc.seed >= 2 ** 64:
            raise ValidationError("$.seed", "must fit in 64 bits")
    if "expect" in raw:
        sc.expect = _object(raw["expect"], "$.expect", ("command", "exit_code", "output"))
    sc.file_tolerances = file_tolerances
    return sc


# --------------------------------------------------------------------------
# serialization


def matrix_to_json(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def _model_to_dict(block: ModelBlock) -> dict:
    out: dict = {}
    if block.dim is not None:
        out["dim"] = block.dim
    if block.classical:
        out["classical"] = True
    if block.assessments:
        out["assessments"] = [{"gamble": matrix_to_json(a.gamble), "strictness": a.strictness.value}
                              for a in block.assessments]
    if block.extreme_points is not None:
        out["extreme_points"] = [matrix_to_json(p) for p in block.extreme_points]
    return out


def scenario_to_dict(sc: ScenarioFile) -> dict:
    out: dict = {"schema": sc.schema}
    if sc.description is not None:
        out["description"] = sc.description
    out.update(_model_to_dict(sc.model))
    if sc.dims is not None:
        out["dims"] = list(sc.dims)
    if sc.models is not None:
        out["models"] = [_model_to_dict(m) for m in sc.models]
    if sc.gambles is not None:
        out["gambles"] = [matrix_to_json(g) for g in sc.gambles]
    if sc.state is not None:
        out["state"] = matrix_to_json(sc.state)
    if sc.states is not None:
        out["states"] = [matrix_to_json(s) for s in sc.states]
    if sc.measurement is not None:
        out["measurement"] = [matrix_to_json(p) for p in sc.measurement]
    if sc.indices is not None:
        out["indices"] = list(sc.indices)
    if sc.unitary is not None:
        out["unitary"] = {"matrix": matrix_to_json(sc.unitary.matrix), "antiunitary": sc.unitary.antiunitary}
    if sc.keep is not None:
        out["keep"] = sc.keep
    if sc.trials is not None:
        out["trials"] = sc.trials
    if sc.seed is not None:
        out["seed"] = sc.seed
    if sc.file_tolerances:
        out["tolerances"] = dict(sc.file_tolerances)
    if sc.expect is not None:
        out["expect"] = sc.expect
    return out


def serialize_scenario(sc: ScenarioFile) -> str:
    return json.dumps(scenario_to_dict(sc), indent=2)
