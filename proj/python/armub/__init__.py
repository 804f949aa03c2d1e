"""Exact constructions of approximate real mutually unbiased bases."""

import json

from ._armub import (
    ExactArithmeticError,
    DomainError,
    NotConstructibleError,
    ParseError,
    ResourceError,
    StructuralError,
    split_dimension,
)
from . import _armub

__all__ = [
    "hadamard",
    "epsh",
    "rbd",
    "armub",
    "verify",
    "split_dimension",
    "ExactArithmeticError",
    "DomainError",
    "NotConstructibleError",
    "ParseError",
    "ResourceError",
    "StructuralError",
]


def hadamard(order):
    """Normalized Hadamard matrix of the given order, as {"order", "rows"}."""
    return json.loads(_armub.hadamard_json(order))


def epsh(order, t, scope="corner-only", cap=100000, threads=1):
    """Minimum-epsilon reduction of H_order by t; t = 0 gives H/sqrt(order)."""
    return json.loads(_armub.epsh_json(order, t, scope, cap, threads))


def rbd(k, s):
    """Affine resolvable design on k*s points with s parallel classes."""
    return json.loads(_armub.rbd_json(k, s))


def armub(k, s, t=1, scope="corner-only", cap=100000, mode="exhaustive", seed=0, threads=1, out=None):
    """Runs the full construction and returns its certificate.

    With out set, every artifact is written to that directory as well.
    """
    return json.loads(_armub.armub_json(k, s, t, scope, cap, mode, seed, threads, None if out is None else str(out)))


def verify(directory, threads=1):
    """Re-certifies an artifact directory."""
    raw = _armub.verify(str(directory), threads)
    return {
        "ok": raw["ok"],
        "failures": list(raw["failures"]),
        "report": json.loads(raw["report"]),
        "ledger": json.loads(raw["ledger"]),
    }
