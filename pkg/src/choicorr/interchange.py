"""JSON interchange for matrices, maps, bases and reports.

A matrix file is ``{"rows": r, "cols": c, "data": [[re, im], ...]}`` with the
entries in row-major order. Optional keys:

``"bipartite": {"n": n, "m": m}``
    the matrix is an element of ``M_n (x) M_m`` (``rows = cols = n*m``).
``"map": {"n": n, "m": m}``
    the matrix is the transfer matrix of a map ``M_n -> M_m``
    (``rows = m^2``, ``cols = n^2``).

A basis file is ``{"n": n, "elements": [<matrix file>, ...]}`` with ``n^2``
elements in lexicographic ``(i, j)`` order.

Floats are written with 17 significant digits, which round-trips IEEE doubles.
"""

from __future__ import annotations

import json
import math
import sys
from typing import Any, Optional

import numpy as np

from .basis import BasisReport, OrderedBasis
from .correspondence import SigmaReport, WitnessRecord
from .linalg import SchmidtDecomposition, as_matrix
from .maps import ChoiLikeMatrix, CpVerdict, LinearMap

__all__ = [
    "FormatError",
    "dumps",
    "load_json",
    "matrix_to_obj",
    "matrix_from_obj",
    "vector_from_obj",
    "map_to_obj",
    "map_from_obj",
    "choi_to_obj",
    "choi_from_obj",
    "basis_to_obj",
    "basis_from_obj",
    "cp_verdict_to_obj",
    "sigma_report_to_obj",
    "basis_report_to_obj",
    "schmidt_to_obj",
]


class FormatError(ValueError):
    """Malformed interchange document."""


def _num(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot encode non-finite number {x!r}")
    text = format(x, ".17g")
    if "." not in text and "e" not in text:
        text += ".0"
    return text


def _is_flat(o) -> bool:
    if isinstance(o, (list, tuple)):
        return all(not isinstance(v, (list, tuple, dict)) for v in o)
    return not isinstance(o, dict)


def _encode(o, level: int) -> str:
    pad = "  " * (level + 1)
    end = "  " * level
    if o is None:
        return "null"
    if isinstance(o, (bool, np.bool_)):
        return "true" if o else "false"
    if isinstance(o, (int, np.integer)):
        return str(int(o))
    if isinstance(o, (float, np.floating)):
        return _num(o)
    if isinstance(o, str):
        return json.dumps(o)
    if isinstance(o, dict):
        if not o:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, level + 1)}" for k, v in o.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(o, (list, tuple)):
        if not o:
            return "[]"
        if all(_is_flat(v) for v in o):
            return "[" + ", ".join(_encode(v, level + 1) for v in o) + "]"
        items = [pad + _encode(v, level + 1) for v in o]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(o).__name__}")


def dumps(obj: Any) -> str:
    """Deterministic JSON text with 17-digit floats."""
    return _encode(obj, 0) + "\n"


def load_json(path: str) -> Any:
    """Read JSON from ``path``, or from stdin when ``path`` is ``"-"``."""
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror or exc}") from exc


def _dims(obj, key) -> Optional[tuple]:
    dims = obj.get(key)
    if dims is None:
        return None
    try:
        n, m = dims["n"], dims["m"]
    except (TypeError, KeyError) as exc:
        raise FormatError(f'"{key}" needs integer "n" and "m"') from exc
    if not (isinstance(n, int) and isinstance(m, int)) or n < 1 or m < 1:
        raise FormatError(f'"{key}" needs positive integer "n" and "m"')
    return n, m


def matrix_to_obj(a, *, bipartite: Optional[tuple] = None, map_dims: Optional[tuple] = None) -> dict:
    a = as_matrix(a)
    obj = {
        "rows": a.shape[0],
        "cols": a.shape[1],
        "data": [[float(z.real), float(z.imag)] for z in a.reshape(-1)],
    }
    if bipartite is not None:
        obj["bipartite"] = {"n": int(bipartite[0]), "m": int(bipartite[1])}
    if map_dims is not None:
        obj["map"] = {"n": int(map_dims[0]), "m": int(map_dims[1])}
    return obj


def _entry(v) -> complex:
    if isinstance(v, bool):
        raise FormatError("boolean is not a matrix entry")
    if isinstance(v, (int, float)):
        return complex(float(v), 0.0)
    if isinstance(v, list) and len(v) == 2 and all(
        isinstance(p, (int, float)) and not isinstance(p, bool) for p in v
    ):
        return complex(float(v[0]), float(v[1]))
    raise FormatError(f"matrix entry must be [re, im], got {v!r}")


def matrix_from_obj(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise FormatError("matrix file must be a JSON object")
    rows, cols, data = obj.get("rows"), obj.get("cols"), obj.get("data")
    if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 1 or cols < 1:
        raise FormatError('"rows" and "cols" must be positive integers')
    if not isinstance(data, list) or len(data) != rows * cols:
        raise FormatError(f'"data" must hold rows*cols = {rows * cols} entries')
    a = np.array([_entry(v) for v in data], dtype=complex).reshape(rows, cols)
    if not np.all(np.isfinite(a)):
        raise FormatError("matrix has non-finite entries")
    bip = _dims(obj, "bipartite")
    if bip is not None and not rows == cols == bip[0] * bip[1]:
        raise FormatError("bipartite matrix must be (n*m) x (n*m)")
    md = _dims(obj, "map")
    if md is not None and (rows, cols) != (md[1] ** 2, md[0] ** 2):
        raise FormatError("transfer matrix of M_n -> M_m must be m^2 x n^2")
    return a


def vector_from_obj(obj) -> np.ndarray:
    a = matrix_from_obj(obj)
    if 1 not in a.shape:
        raise FormatError(f"expected a row or column vector, got {a.shape[0]}x{a.shape[1]}")
    return a.reshape(-1)


def map_to_obj(phi: LinearMap) -> dict:
    return matrix_to_obj(phi.transfer, map_dims=(phi.n, phi.m))


def map_from_obj(obj) -> LinearMap:
    t = matrix_from_obj(obj)
    md = _dims(obj, "map")
    try:
        if md is not None:
            return LinearMap(md[0], md[1], t)
        return LinearMap.from_transfer(t)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def choi_to_obj(c: ChoiLikeMatrix) -> dict:
    return matrix_to_obj(c.matrix, bipartite=(c.n, c.m))


def choi_from_obj(obj) -> ChoiLikeMatrix:
    a = matrix_from_obj(obj)
    bip = _dims(obj, "bipartite")
    try:
        if bip is not None:
            return ChoiLikeMatrix(bip[0], bip[1], a)
        return ChoiLikeMatrix.square(a)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def basis_to_obj(basis: OrderedBasis) -> dict:
    return {"n": basis.n, "elements": [matrix_to_obj(b) for b in basis.elements]}


def basis_from_obj(obj) -> OrderedBasis:
    if not isinstance(obj, dict):
        raise FormatError("basis file must be a JSON object")
    n, elements = obj.get("n"), obj.get("elements")
    if not isinstance(n, int) or n < 1:
        raise FormatError('"n" must be a positive integer')
    if not isinstance(elements, list) or len(elements) != n * n:
        raise FormatError(f'"elements" must hold n^2 = {n * n} matrices')
    mats = [matrix_from_obj(e) for e in elements]
    try:
        return OrderedBasis(n, tuple(mats))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def _real_list(v) -> list:
    return [float(x) for x in np.asarray(v).real]


def _vectors(cols: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in cols[:, k]] for k in range(cols.shape[1])]


def cp_verdict_to_obj(v: CpVerdict) -> dict:
    obj = {"is_cp": v.is_cp, "min_eigenvalue": v.min_choi_eigenvalue}
    if v.kraus is not None:
        obj["kraus_count"] = len(v.kraus)
    if v.negative_witness is not None:
        obj["negative_witness"] = [[float(z.real), float(z.imag)] for z in v.negative_witness]
    return obj


def _witness_to_obj(w: Optional[WitnessRecord]) -> Optional[dict]:
    if w is None:
        return None
    return {"kind": w.kind, "validated": w.validated, "map": map_to_obj(w.map)}


def sigma_report_to_obj(r: SigmaReport) -> dict:
    return {
        "n": r.n,
        "verdict": r.verdict,
        "eigenvalues": _real_list(r.eigenvalues),
        "is_psd": r.is_psd,
        "rank": r.rank,
        "schmidt_rank_of_range": r.schmidt_rank_of_range,
        "sigma_is_cp": r.sigma_is_cp,
        "sigma_invertible": r.sigma_invertible,
        "sigma_inverse_is_cp": r.sigma_inverse_is_cp,
        "is_coi": r.is_coi,
        "conditions_agree": r.conditions_agree,
        "certificate_s": None if r.certificate_s is None else matrix_to_obj(r.certificate_s),
        "witness": _witness_to_obj(r.witness),
    }


def basis_report_to_obj(r: BasisReport) -> dict:
    return {
        "n": r.sigma_b.n,
        "verdict": r.verdict,
        "is_basis": r.is_basis,
        "mb_choi_psd": r.mb_choi_psd,
        "mb_choi_rank": r.mb_choi_rank,
        "sigma_b_hermitian": r.sigma_b_hermitian,
        "sigma_b_eigenvalues": None if r.sigma_report is None else _real_list(r.sigma_report.eigenvalues),
        "two_path_residual": r.two_path_residual,
        "s_certificate": None if r.s_certificate is None else matrix_to_obj(r.s_certificate),
        "zeta_form": r.zeta_form,
        "zeta": None if r.zeta is None else _vectors(r.zeta),
        "sigma_b": choi_to_obj(r.sigma_b),
        "witness": _witness_to_obj(r.witness),
    }


def schmidt_to_obj(d: SchmidtDecomposition) -> dict:
    return {
        "schmidt_rank": d.schmidt_rank,
        "coefficients": _real_list(d.coefficients),
        "left_vectors": _vectors(d.left_vectors),
        "right_vectors": _vectors(d.right_vectors),
    }
