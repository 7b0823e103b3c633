"""On-disk instance format: one JSON envelope for all eight problem kinds.

Every file is ``{"kind": <tag>, "version": 1, "payload": {...}}`` with all
integers rendered as decimal strings.  Native JSON numbers round-trip through
doubles in most parsers and silently lose precision beyond 2^53 -- the
proximity constants blow past that even at d = 2, and the knapsack
compression demos start at 64-bit coefficients on purpose.

Writes go to a temp file in the target directory followed by os.replace, so
a crashed run never leaves a half-written instance behind.
"""

from __future__ import annotations

import json
import os
import tempfile
from typing import Any, Optional, Sequence

from .budget import InputError
from .exactmath import IntMatrix, IntVector
from .ilpcore import FeasIlp
from .ilpreduce import NFoldIlp, TwoStageIlp
from .knapfam import (
    KnapsackInstance,
    MdKnapsackInstance,
    SubsetSumInstance,
    UnboundedKnapsackInstance,
)
from .schedbal import LoadBalancingInstance, PreSolution

SCHEMA_VERSION = 1

KINDS = (
    "ilp",
    "two_stage",
    "nfold",
    "knapsack",
    "subsetsum",
    "uks",
    "mdks",
    "loadbalance",
    "presolution",
)


def _enc_int(v: int) -> str:
    return str(v)


def _enc_vec(v: Sequence[int]) -> list[str]:
    return [str(x) for x in v]


def _enc_mat(m: IntMatrix) -> list[list[str]]:
    return [_enc_vec(row) for row in m.iter_rows()]


def _enc_bounds(upper: Optional[Sequence[Optional[int]]]):
    if upper is None:
        return None
    return [None if u is None else str(u) for u in upper]


def _dec_int(v: Any, what: str) -> int:
    # Integers must arrive as strings; a bare JSON number is a schema error
    # because the writer would have lost precision producing it.
    if not isinstance(v, str):
        raise InputError(f"{what} must be a decimal string, got {type(v).__name__}")
    try:
        return int(v)
    except ValueError as exc:
        raise InputError(f"{what} is not a decimal integer: {v!r}") from exc


def _dec_vec(v: Any, what: str) -> IntVector:
    if not isinstance(v, list):
        raise InputError(f"{what} must be a list")
    return tuple(_dec_int(x, what) for x in v)


def _dec_mat(v: Any, what: str) -> IntMatrix:
    if not isinstance(v, list) or not v:
        raise InputError(f"{what} must be a nonempty list of rows")
    return IntMatrix.from_rows([_dec_vec(row, what) for row in v])


def _dec_bounds(v: Any, what: str):
    if v is None:
        return None
    if not isinstance(v, list):
        raise InputError(f"{what} must be null or a list")
    return tuple(None if u is None else _dec_int(u, what) for u in v)


def encode_instance(obj: object) -> dict:
    """Wrap a library object in its JSON envelope."""
    if isinstance(obj, FeasIlp):
        payload = {
            "a": _enc_mat(obj.a),
            "b": _enc_vec(obj.b),
            "lower": _enc_vec(obj.lower),
            "upper": _enc_bounds(obj.upper),
        }
        kind = "ilp"
    elif isinstance(obj, TwoStageIlp):
        payload = {
            "a_blocks": [_enc_mat(a) for a in obj.a_blocks],
            "b_blocks": [_enc_mat(b) for b in obj.b_blocks],
            "rhs": [_enc_vec(r) for r in obj.rhs],
        }
        kind = "two_stage"
    elif isinstance(obj, NFoldIlp):
        payload = {
            "a_blocks": [_enc_mat(a) for a in obj.a_blocks],
            "b_blocks": [_enc_mat(b) for b in obj.b_blocks],
            "rhs_link": _enc_vec(obj.rhs_link),
            "rhs": [_enc_vec(r) for r in obj.rhs],
        }
        kind = "nfold"
    elif isinstance(obj, KnapsackInstance):
        payload = {
            "weights": _enc_vec(obj.weights),
            "profits": _enc_vec(obj.profits),
            "capacity": _enc_int(obj.capacity),
            "target": _enc_int(obj.target),
        }
        kind = "knapsack"
    elif isinstance(obj, UnboundedKnapsackInstance):
        payload = {
            "weights": _enc_vec(obj.weights),
            "profits": _enc_vec(obj.profits),
            "capacity": _enc_int(obj.capacity),
            "target": _enc_int(obj.target),
        }
        kind = "uks"
    elif isinstance(obj, SubsetSumInstance):
        payload = {"values": _enc_vec(obj.values), "target": _enc_int(obj.target)}
        kind = "subsetsum"
    elif isinstance(obj, MdKnapsackInstance):
        payload = {
            "weight_matrix": _enc_mat(obj.weight_matrix),
            "profits": _enc_vec(obj.profits),
            "capacities": _enc_vec(obj.capacities),
            "target": _enc_int(obj.target),
        }
        kind = "mdks"
    elif isinstance(obj, LoadBalancingInstance):
        payload = {
            "p": _enc_vec(obj.p),
            "n": _enc_vec(obj.n),
            "m": _enc_int(obj.m),
            "l": _enc_int(obj.l),
            "u": _enc_int(obj.u),
        }
        kind = "loadbalance"
    else:
        raise InputError(f"cannot serialize {type(obj).__name__}")
    return {"kind": kind, "version": SCHEMA_VERSION, "payload": payload}


def encode_presolution(pre: object, for_kind: str) -> dict:
    """Envelope for the pre-decided part of an equivalent-instance reduction."""
    if isinstance(pre, PreSolution):
        payload: dict[str, Any] = {
            "for": for_kind,
            "per_machine": _enc_vec(pre.per_machine),
            "fixed_groups": [
                [_enc_int(count), _enc_vec(conf)] for count, conf in pre.fixed_groups
            ],
        }
    elif isinstance(pre, tuple) and all(isinstance(x, int) for x in pre):
        payload = {"for": for_kind, "fixed": _enc_vec(pre)}
    elif isinstance(pre, tuple) and all(
        x is None or (isinstance(x, tuple) and len(x) == 2) for x in pre
    ):
        # the uks expansion map: expanded column -> (item, power-of-two copy)
        payload = {
            "for": for_kind,
            "copies": [None if x is None else _enc_vec(x) for x in pre],
        }
    else:
        raise InputError(f"cannot serialize pre-solution {type(pre).__name__}")
    return {"kind": "presolution", "version": SCHEMA_VERSION, "payload": payload}


def decode_envelope(doc: Any) -> object:
    """Inverse of encode_instance / encode_presolution."""
    if not isinstance(doc, dict):
        raise InputError("instance file must contain a JSON object")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise InputError(f"unknown kind {kind!r}; expected one of {KINDS}")
    version = doc.get("version")
    if version != SCHEMA_VERSION:
        raise InputError(f"unsupported schema version {version!r}")
    payload = doc.get("payload")
    if not isinstance(payload, dict):
        raise InputError("payload must be a JSON object")

    if kind == "ilp":
        return FeasIlp(
            a=_dec_mat(payload["a"], "a"),
            b=_dec_vec(payload["b"], "b"),
            lower=_dec_vec(payload["lower"], "lower") if payload.get("lower") else (),
            upper=_dec_bounds(payload.get("upper"), "upper"),
        )
    if kind == "two_stage":
        return TwoStageIlp(
            a_blocks=tuple(_dec_mat(a, "a_blocks") for a in payload["a_blocks"]),
            b_blocks=tuple(_dec_mat(b, "b_blocks") for b in payload["b_blocks"]),
            rhs=tuple(_dec_vec(r, "rhs") for r in payload["rhs"]),
        )
    if kind == "nfold":
        return NFoldIlp(
            a_blocks=tuple(_dec_mat(a, "a_blocks") for a in payload["a_blocks"]),
            b_blocks=tuple(_dec_mat(b, "b_blocks") for b in payload["b_blocks"]),
            rhs_link=_dec_vec(payload["rhs_link"], "rhs_link"),
            rhs=tuple(_dec_vec(r, "rhs") for r in payload["rhs"]),
        )
    if kind == "knapsack":
        return KnapsackInstance(
            weights=_dec_vec(payload["weights"], "weights"),
            profits=_dec_vec(payload["profits"], "profits"),
            capacity=_dec_int(payload["capacity"], "capacity"),
            target=_dec_int(payload["target"], "target"),
        )
    if kind == "uks":
        return UnboundedKnapsackInstance(
            weights=_dec_vec(payload["weights"], "weights"),
            profits=_dec_vec(payload["profits"], "profits"),
            capacity=_dec_int(payload["capacity"], "capacity"),
            target=_dec_int(payload["target"], "target"),
        )
    if kind == "subsetsum":
        return SubsetSumInstance(
            values=_dec_vec(payload["values"], "values"),
            target=_dec_int(payload["target"], "target"),
        )
    if kind == "mdks":
        return MdKnapsackInstance(
            weight_matrix=_dec_mat(payload["weight_matrix"], "weight_matrix"),
            profits=_dec_vec(payload["profits"], "profits"),
            capacities=_dec_vec(payload["capacities"], "capacities"),
            target=_dec_int(payload["target"], "target"),
        )
    if kind == "loadbalance":
        return LoadBalancingInstance(
            p=_dec_vec(payload["p"], "p"),
            n=_dec_vec(payload["n"], "n"),
            m=_dec_int(payload["m"], "m"),
            l=_dec_int(payload["l"], "l"),
            u=_dec_int(payload["u"], "u"),
        )
    # presolution
    if "fixed" in payload:
        return _dec_vec(payload["fixed"], "fixed")
    if "copies" in payload:
        return tuple(
            None if x is None else _dec_vec(x, "copies")
            for x in payload["copies"]
        )
    return PreSolution(
        per_machine=_dec_vec(payload["per_machine"], "per_machine"),
        fixed_groups=tuple(
            (_dec_int(count, "fixed_groups"), _dec_vec(conf, "fixed_groups"))
            for count, conf in payload["fixed_groups"]
        ),
    )


def kind_of(obj: object) -> str:
    return encode_instance(obj)["kind"]


def write_instance(path: str, doc: dict) -> None:
    """Atomic JSON write: temp file in the same directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".instakernel-", suffix=".json", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_instance(path: str) -> object:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    try:
        return decode_envelope(doc)
    except KeyError as exc:
        raise InputError(f"{path} is missing field {exc}") from exc
