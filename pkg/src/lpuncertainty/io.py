"""JSON encodings for pairs, matrices, certificates and reports.

Floats go through ``json`` which writes the shortest repr that round-trips,
so a pair read back from a file is bit-identical to the one written. Complex
entries are ``[re, im]``; real entries are bare numbers. Subsets are written
as sorted 1-based index lists.
"""

from __future__ import annotations

import datetime
import json
import math

import numpy as np

from . import __version__
from .bases import BasisPair
from .grams import AdmissibilityReport, CrossGram, SubsetPair


class SchemaError(ValueError):
    """A document does not match the expected schema."""


def num(x):
    """Float for JSON; non-finite values become null."""
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def encode_array(A):
    A = np.asarray(A)
    if np.iscomplexobj(A):
        return np.stack([A.real, A.imag], axis=-1).tolist()
    return A.astype(float).tolist()


def _entry(z):
    if isinstance(z, bool):
        raise SchemaError(f"bad scalar {z!r}")
    if isinstance(z, (int, float)):
        return complex(float(z), 0.0)
    if isinstance(z, list) and len(z) in (1, 2) and all(
        isinstance(t, (int, float)) and not isinstance(t, bool) for t in z
    ):
        return complex(float(z[0]), float(z[1]) if len(z) == 2 else 0.0)
    raise SchemaError(f"bad scalar {z!r}")


def decode_vector(data, field=None) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise SchemaError("vector must be a nonempty list")
    v = np.array([_entry(z) for z in data], dtype=np.complex128)
    if not np.all(np.isfinite(v)):
        raise SchemaError("vector has non-finite entries")
    if field == "real" or (field is None and not any(isinstance(z, list) and len(z) == 2 for z in data)):
        if np.any(v.imag != 0):
            raise SchemaError("real field with nonzero imaginary parts")
        return v.real.copy()
    return v


def decode_matrix(rows, n_rows=None, n_cols=None, field=None) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise SchemaError("matrix must be a nonempty list of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise SchemaError("matrix rows have unequal lengths")
    if (n_rows is not None and len(rows) != n_rows) or (n_cols is not None and width != n_cols):
        raise SchemaError(f"matrix is {len(rows)}x{width}, expected {n_rows}x{n_cols}")
    A = np.array([[_entry(z) for z in r] for r in rows], dtype=np.complex128)
    if not np.all(np.isfinite(A)):
        raise SchemaError("matrix has non-finite entries")
    if field is None:
        field = "complex" if any(isinstance(z, list) and len(z) == 2 for r in rows for z in r) else "real"
    if field == "real":
        if np.any(A.imag != 0):
            raise SchemaError("real field with nonzero imaginary parts")
        return A.real.copy()
    return A


def pair_to_dict(pair: BasisPair) -> dict:
    return {
        "n": pair.n,
        "p": pair.p,
        "field": pair.field,
        "T": encode_array(pair.T),
        "F": encode_array(pair.F),
    }


def pair_from_dict(d) -> BasisPair:
    if not isinstance(d, dict):
        raise SchemaError("basis document must be an object")
    try:
        n, p, field = d["n"], d["p"], d.get("field", "real")
        T, F = d["T"], d["F"]
    except KeyError as e:
        raise SchemaError(f"basis document lacks {e.args[0]!r}") from None
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SchemaError(f"n must be a positive integer, got {n!r}")
    if not isinstance(p, (int, float)) or isinstance(p, bool):
        raise SchemaError(f"p must be a number, got {p!r}")
    if field not in ("real", "complex"):
        raise SchemaError(f"field must be 'real' or 'complex', got {field!r}")
    return BasisPair(decode_matrix(T, n, n, field), decode_matrix(F, n, n, field), float(p))


def matrix_to_dict(A) -> dict:
    A = np.asarray(A)
    return {
        "rows": A.shape[0],
        "cols": A.shape[1],
        "field": "complex" if np.iscomplexobj(A) else "real",
        "entries": encode_array(A),
    }


def matrix_from_dict(d) -> np.ndarray:
    if not isinstance(d, dict) or "entries" not in d:
        raise SchemaError("matrix document must be an object with 'entries'")
    return decode_matrix(d["entries"], d.get("rows"), d.get("cols"), d.get("field"))


def subsets_to_dict(s: SubsetPair) -> dict:
    M, N = s.one_based
    return {"M": M, "N": N, "n": s.universe}


def subsets_from_dict(d) -> SubsetPair:
    return SubsetPair.from_one_based(d["M"], d["N"], d["n"])


def admissibility_to_dict(r: AdmissibilityReport) -> dict:
    return {
        "mu": num(r.mu),
        "bound": num(r.bound),
        "admissible": r.admissible,
        "constant": num(r.constant),
        "empty_subset_convention": r.empty_subset,
    }


def gram_to_dict(gram: CrossGram) -> dict:
    d = matrix_to_dict(gram.G)
    d["source_f"] = gram.source_f
    d["source_g"] = gram.source_g
    return d


def certificate_to_dict(c) -> dict:
    return {
        "variant": c.variant,
        "n": c.n,
        "p": c.p,
        "subsets": subsets_to_dict(c.subsets),
        "lhs": num(c.lhs),
        "rhs": num(c.rhs),
        "constant": num(c.constant),
        "tail_f": num(c.tail_f),
        "tail_g": num(c.tail_g),
        "slack": num(c.slack),
        "admissibility": admissibility_to_dict(c.admissibility),
        "input_digest": c.digest,
        "pair_digests": list(c.pair_digests),
        "version": __version__,
    }


def norm_estimate_to_dict(e) -> dict:
    return {
        "lower": num(e.lower),
        "upper": num(e.upper),
        "method": e.method,
        "lower_method": e.lower_method,
        "converged": e.converged,
        "flags": list(e.flags),
        "candidates": {k: num(v) for k, v in e.candidates.items()},
        "witness": encode_array(e.witness),
    }


def annihilation_to_dict(r) -> dict:
    return {
        "intersection_dim": r.intersection_dim,
        "smallest_gap": num(r.smallest_gap),
        "witness": None if r.witness is None else encode_array(r.witness),
        "residual_f": num(r.residual_f),
        "residual_g": num(r.residual_g),
    }


def validation_to_dict(r) -> dict:
    return {
        "valid": r.valid,
        "violated_clause": r.violated_clause,
        "violations": list(r.violations),
        "witness": None if r.witness is None else encode_array(r.witness),
        "distortion": num(r.distortion),
        "structural_ok": r.structural_ok,
        "empirical_ok": r.empirical_ok,
        "details": {k: num(v) for k, v in r.details.items()},
    }


def extremal_to_dict(r) -> dict:
    cfg = r.config
    return {
        "n": r.n,
        "p": r.p,
        "variant": r.variant,
        "ratio": num(r.ratio),
        "best_x": encode_array(r.best_x),
        "subsets": subsets_to_dict(r.subsets),
        "certificate": certificate_to_dict(r.certificate),
        "trace": [num(t) for t in r.trace],
        "config": {k: getattr(cfg, k) for k in cfg.__dataclass_fields__},
    }


def manifest(command: str, config: dict, seeds=(), input_digests=()) -> dict:
    return {
        "command": command,
        "config": config,
        "version": __version__,
        "seeds": list(seeds),
        "input_digests": list(input_digests),
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }


def dumps(obj) -> str:
    return json.dumps(obj, allow_nan=False)


def write_json(path, obj):
    with open(path, "w") as fh:
        fh.write(dumps(obj))
        fh.write("\n")


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise SchemaError(f"cannot read {path}: {e}") from None


def read_pair(path) -> BasisPair:
    return pair_from_dict(read_json(path))


def write_pair(path, pair: BasisPair, manifest_doc=None):
    doc = pair_to_dict(pair)
    if manifest_doc is not None:
        doc["manifest"] = manifest_doc
    write_json(path, doc)
