"""Model-file ingestion and serialization.

A model file is a JSON document with sections: `space` (tensor factor
dimensions), `channels`, `operators` (the scaling roles Y/A/B/F/G/W, each
given either as a dense complex matrix in row-major nested [re, im] form or
as an expression tree over oscillator/matrix-unit primitives), `p0` (the
slow projection, as a matrix or a basis-index list), and an optional
`study` section with schedule and grid parameters.

Parsing is total: any inconsistency raises ModelParseError, never a
half-built model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelParseError
from .models import Fixture, fock_toolbox
from .operator_core import HilbertSpace, Operator, SubspacePair
from .qsde_model import ScaledFamily
from .semigroup import FieldAmplitudes

DEFAULT_K_SCHEDULE = (2.0, 4.0, 8.0, 16.0, 32.0, 64.0)


def _complex_from_pair(pair) -> complex:
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
        raise ModelParseError(f"expected [re, im] pair, got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def _pair(z: complex):
    return [float(z.real), float(z.imag)]


def matrix_to_json(m: np.ndarray):
    return [[_pair(z) for z in row] for row in np.asarray(m, dtype=complex)]


def matrix_from_json(rows) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise ModelParseError("matrix must be a nonempty nested list")
    try:
        return np.array(
            [[_complex_from_pair(z) for z in row] for row in rows], dtype=complex
        )
    except (TypeError, ValueError) as exc:
        raise ModelParseError(f"bad matrix entries: {exc}") from exc


def _funcalc(name: str, params: dict, x: np.ndarray) -> np.ndarray:
    herm_defect = np.linalg.norm(x - x.conj().T, 2)
    if herm_defect > 1e-10 * max(1.0, np.linalg.norm(x, 2)):
        raise ModelParseError("funcalc operand must be Hermitian")
    evals, q = np.linalg.eigh(x)
    theta = float(params.get("theta", 1.0))
    gamma = float(params.get("gamma", 1.0))
    if name == "damped_cayley":
        vals = (1j * theta * evals + gamma / 2) / (1j * theta * evals - gamma / 2)
    elif name == "damped_resolvent":
        vals = 1.0 / (1j * theta * evals - gamma / 2)
    else:
        raise ModelParseError(f"unknown funcalc function {name!r}")
    return q @ np.diag(vals) @ q.conj().T


def eval_expression(node) -> np.ndarray:
    """Evaluate an operator expression tree to a dense complex matrix."""
    if isinstance(node, list):
        return matrix_from_json(node)
    if not isinstance(node, dict) or "op" not in node:
        raise ModelParseError(f"operator must be a matrix or an expression: {node!r}")
    op = node["op"]
    try:
        if op == "identity":
            return np.eye(int(node["dim"]), dtype=complex)
        if op == "annihilator":
            return fock_toolbox(int(node["dim"]) - 1).b.entries.copy()
        if op == "creator":
            return fock_toolbox(int(node["dim"]) - 1).b_dag.entries.copy()
        if op == "number":
            return fock_toolbox(int(node["dim"]) - 1).number.entries.copy()
        if op == "basis_matrix":
            d, i, j = int(node["dim"]), int(node["row"]), int(node["col"])
            m = np.zeros((d, d), dtype=complex)
            m[i, j] = 1.0
            return m
        if op == "kron":
            args = node["args"]
            if len(args) < 2:
                raise ModelParseError("kron needs >= 2 arguments")
            out = eval_expression(args[0])
            for arg in args[1:]:
                out = np.kron(out, eval_expression(arg))
            return out
        if op == "scale":
            return _complex_from_pair(node["factor"]) * eval_expression(node["arg"])
        if op == "add":
            args = [eval_expression(a) for a in node["args"]]
            shapes = {a.shape for a in args}
            if len(shapes) != 1:
                raise ModelParseError("add arguments must share a shape")
            return sum(args)
        if op == "adjoint":
            return eval_expression(node["arg"]).conj().T
        if op == "funcalc":
            return _funcalc(
                node["name"], node.get("params", {}), eval_expression(node["arg"])
            )
    except ModelParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelParseError(f"bad {op!r} node: {exc}") from exc
    raise ModelParseError(f"unknown expression op {op!r}")


@dataclass(frozen=True)
class StudyParams:
    t_max: float = 2.0
    grid_points: int = 64
    k_schedule: tuple[float, ...] = DEFAULT_K_SCHEDULE
    alpha: tuple[complex, ...] | None = None
    beta: tuple[complex, ...] | None = None
    tol: float = 1e-9

    def amplitudes(self, n: int) -> FieldAmplitudes:
        alpha = self.alpha if self.alpha is not None else (0.0,) * n
        beta = self.beta if self.beta is not None else (0.0,) * n
        return FieldAmplitudes(tuple(alpha), tuple(beta))


@dataclass(frozen=True)
class ModelFile:
    name: str
    family: ScaledFamily
    sub: SubspacePair
    study: StudyParams = field(default_factory=StudyParams)


def _operator(space: HilbertSpace, node, role: str) -> Operator:
    m = eval_expression(node)
    if m.shape != (space.total_dim, space.total_dim):
        raise ModelParseError(
            f"operator {role} has shape {m.shape}, expected square of "
            f"dimension {space.total_dim}"
        )
    return Operator(space, m)


def parse_model(doc: dict) -> ModelFile:
    """Build a validated model from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise ModelParseError("model document must be a JSON object")
    try:
        space = HilbertSpace(tuple(int(d) for d in doc["space"]["factor_dims"]))
        n = int(doc["channels"])
        ops = doc["operators"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelParseError(f"missing or malformed section: {exc}") from exc
    if n < 1:
        raise ModelParseError("channels must be >= 1")
    if not isinstance(ops, dict) or not ops:
        raise ModelParseError("operators section must be a nonempty object")

    def get_list(role: str):
        block = ops.get(role)
        if not isinstance(block, list) or len(block) != n:
            raise ModelParseError(f"{role} must be a list of {n} operators")
        return tuple(_operator(space, x, f"{role}[{i}]") for i, x in enumerate(block))

    try:
        y = _operator(space, ops["Y"], "Y")
        a = _operator(space, ops["A"], "A")
        b = _operator(space, ops["B"], "B")
        f_ops = get_list("F")
        g_ops = get_list("G")
        w_block = ops["W"]
    except KeyError as exc:
        raise ModelParseError(f"operators section missing role {exc}") from exc
    if not isinstance(w_block, list) or len(w_block) != n or any(
        not isinstance(row, list) or len(row) != n for row in w_block
    ):
        raise ModelParseError(f"W must be an {n} x {n} grid of operators")
    w_ops = tuple(
        tuple(_operator(space, w_block[i][j], f"W[{i}][{j}]") for j in range(n))
        for i in range(n)
    )
    try:
        family = ScaledFamily(
            n=n, space=space, y=y, a=a, b=b,
            f_ops=f_ops, g_ops=g_ops, w_ops=w_ops,
        )
    except ValueError as exc:
        raise ModelParseError(str(exc)) from exc

    p0_node = doc.get("p0")
    if p0_node is None:
        raise ModelParseError("model must declare the slow projection p0")
    try:
        if isinstance(p0_node, dict) and "basis_indices" in p0_node:
            sub = SubspacePair.from_basis_indices(
                space, tuple(int(i) for i in p0_node["basis_indices"])
            )
        else:
            sub = SubspacePair.from_projection(_operator(space, p0_node, "p0"))
    except (ValueError, TypeError, IndexError) as exc:
        raise ModelParseError(f"bad p0 section: {exc}") from exc

    study_doc = doc.get("study", {})
    if not isinstance(study_doc, dict):
        raise ModelParseError("study section must be an object")
    try:
        study = StudyParams(
            t_max=float(study_doc.get("T", 2.0)),
            grid_points=int(study_doc.get("grid_points", 64)),
            k_schedule=tuple(
                float(k) for k in study_doc.get("k_schedule", DEFAULT_K_SCHEDULE)
            ),
            alpha=(
                tuple(_complex_from_pair(z) for z in study_doc["alpha"])
                if "alpha" in study_doc else None
            ),
            beta=(
                tuple(_complex_from_pair(z) for z in study_doc["beta"])
                if "beta" in study_doc else None
            ),
            tol=float(study_doc.get("tol", 1e-9)),
        )
    except (TypeError, ValueError) as exc:
        raise ModelParseError(f"bad study section: {exc}") from exc
    for amps in (study.alpha, study.beta):
        if amps is not None and len(amps) != n:
            raise ModelParseError("study amplitudes must have one entry per channel")
    name = str(doc.get("name", "model"))
    return ModelFile(name=name, family=family, sub=sub, study=study)


def load_model(path: str) -> ModelFile:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelParseError(f"cannot read model file {path}: {exc}") from exc
    return parse_model(doc)


def fixture_to_model_dict(fix: Fixture, study: dict | None = None) -> dict:
    """Serialize a fixture as a dense-matrix model document."""
    fam = fix.family
    doc = {
        "name": fix.name,
        "space": {"factor_dims": list(fam.space.factor_dims)},
        "channels": fam.n,
        "operators": {
            "Y": matrix_to_json(fam.y.entries),
            "A": matrix_to_json(fam.a.entries),
            "B": matrix_to_json(fam.b.entries),
            "F": [matrix_to_json(f.entries) for f in fam.f_ops],
            "G": [matrix_to_json(g.entries) for g in fam.g_ops],
            "W": [
                [matrix_to_json(op.entries) for op in row] for row in fam.w_ops
            ],
        },
        "p0": matrix_to_json(fix.sub.p0.entries),
    }
    if study:
        doc["study"] = study
    return doc


def limit_to_json(result) -> dict:
    """Serialize elimination output (limit quadruple plus compression)."""
    limit = result.limit
    return {
        "channels": limit.n,
        "space": {"factor_dims": list(limit.space.factor_dims)},
        "K": matrix_to_json(limit.k_op.entries),
        "L": [matrix_to_json(op.entries) for op in limit.l_ops],
        "M": [matrix_to_json(op.entries) for op in limit.m_ops],
        "N": [
            [matrix_to_json(op.entries) for op in row] for row in limit.n_ops
        ],
        "compression": [
            [_pair(z) for z in row] for row in np.asarray(result.compression)
        ],
    }
