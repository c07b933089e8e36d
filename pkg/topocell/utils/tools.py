# -*- coding: utf-8 -*-
# This file is part of TopoCell - persistent-homology tools for cell layouts
# See the file 'LICENSE' for copying permission.

import hashlib
import math
from pathlib import Path
from typing import Dict, Iterable, List, Sequence

import numpy as np

from topocell.errors import ParameterError

DIGEST_CHUNK = 1 << 16


def file_digest(path) -> str:
    """
    SHA-256 of a file, read in chunks.
    """
    sha = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(DIGEST_CHUNK), b""):
            sha.update(chunk)
    return sha.hexdigest()


def layout_digests(paths: Iterable) -> Dict[str, str]:
    """
    Digest every layout CSV together with its JSON sidecar, keyed by path.
    """
    digests = {}
    for path in paths:
        path = Path(path)
        digests[str(path)] = file_digest(path)
        sidecar = path.with_suffix(".json")
        if sidecar.is_file():
            digests[str(sidecar)] = file_digest(sidecar)
    return digests


def parse_floats(text: str, name: str = "values") -> List[float]:
    """
    ``"15,30,45"`` -> ``[15.0, 30.0, 45.0]``.
    """
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as error:
        raise ParameterError(f"Cannot parse {name} {text!r}.") from error


def parse_ints(text: str, name: str = "values") -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as error:
        raise ParameterError(f"Cannot parse {name} {text!r}.") from error


def parse_dims(text: str) -> tuple:
    dims = tuple(sorted(set(parse_ints(text, "dims"))))
    if not dims or not set(dims) <= {0, 1}:
        raise ParameterError(f"--dims must be 1 or 0,1, got {text!r}.")
    return dims


def clean(value):
    """
    Turn numpy scalars, arrays and NaN into plain JSON values.
    """
    if isinstance(value, dict):
        return {str(k): clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return clean(value.tolist())
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if math.isnan(value) or math.isinf(value) else value
    return value


def stable_mean(values: Sequence[float]) -> float:
    """
    Exactly rounded mean, independent of the order of ``values``.
    """
    values = list(values)
    return math.fsum(values) / len(values)
