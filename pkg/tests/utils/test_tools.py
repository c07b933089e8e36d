import hashlib
import json

import numpy as np
import pytest

from topocell.errors import ParameterError
from topocell.utils.tools import (
    clean,
    file_digest,
    layout_digests,
    parse_dims,
    parse_floats,
    parse_ints,
    stable_mean,
)


def test_file_digest(tmp_path):
    path = tmp_path / "layout.csv"
    path.write_bytes(b"x,y,class\n" * 10000)

    assert file_digest(path) == hashlib.sha256(b"x,y,class\n" * 10000).hexdigest()


def test_layout_digests_include_sidecars(tmp_path):
    with_sidecar = tmp_path / "a.csv"
    with_sidecar.write_text("x,y,class\n")
    (tmp_path / "a.json").write_text("{}")
    alone = tmp_path / "b.csv"
    alone.write_text("x,y,class\n")

    digests = layout_digests([with_sidecar, alone])

    assert sorted(digests) == sorted(
        [str(with_sidecar), str(tmp_path / "a.json"), str(alone)]
    )
    assert digests[str(with_sidecar)] == digests[str(alone)]


def test_parse_numbers():
    assert parse_floats("15,30, 45") == [15.0, 30.0, 45.0]
    assert parse_ints("3,4,") == [3, 4]
    with pytest.raises(ParameterError):
        parse_floats("1,two")
    with pytest.raises(ParameterError):
        parse_ints("1.5")


@pytest.mark.parametrize("text, dims", [("1", (1,)), ("1,0", (0, 1)), ("0,0", (0,))])
def test_parse_dims(text, dims):
    assert parse_dims(text) == dims


@pytest.mark.parametrize("text", ["2", "0,1,2", ""])
def test_parse_dims_rejects(text):
    with pytest.raises(ParameterError):
        parse_dims(text)


def test_clean_produces_strict_json():
    value = {
        1: np.array([1.0, np.nan]),
        "count": np.int64(3),
        "values": (np.float32(0.5), float("inf")),
    }

    cleaned = clean(value)

    assert cleaned == {"1": [1.0, None], "count": 3, "values": [0.5, None]}
    json.dumps(cleaned, allow_nan=False)


def test_stable_mean_ignores_order():
    values = [1e16, 1.0, -1e16, 3.0]

    assert stable_mean(values) == 1.0
    assert stable_mean(values[::-1]) == 1.0
