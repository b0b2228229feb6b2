import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nspkit.io import (
    MatrixFileError,
    dump_json,
    format_matrix,
    make_certificate,
    matrix_from_obj,
    parse_matrix,
    read_vector,
)
from nspkit.linalg import DEFAULT_TOL

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@st.composite
def matrices(draw):
    r = draw(st.integers(1, 5))
    c = draw(st.integers(1, 5))
    rows = draw(st.lists(st.lists(finite, min_size=c, max_size=c), min_size=r, max_size=r))
    return np.array(rows, dtype=float)


@settings(max_examples=200, deadline=None)
@given(matrices(), st.sampled_from(["json", "text"]))
def test_round_trip_is_bit_exact(A, fmt):
    B = parse_matrix(format_matrix(A, fmt))
    assert B.shape == A.shape
    assert np.array_equal(B.view(np.uint64), A.view(np.uint64))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.decimals(allow_nan=False, allow_infinity=False, places=6,
                            min_value=-1e6, max_value=1e6), min_size=1, max_size=6))
def test_decimal_strings_round_trip(values):
    text = " ".join(str(v) for v in values) + "\n"
    A = parse_matrix(text)
    again = parse_matrix(format_matrix(A))
    assert np.array_equal(A, again)
    assert np.array_equal(again, parse_matrix(format_matrix(again, "text")))


def test_text_with_comments():
    A = parse_matrix("# header\n1 2  # trailing\n\n3 4\n")
    assert np.array_equal(A, [[1.0, 2.0], [3.0, 4.0]])


def test_empty_json_matrix():
    A = parse_matrix('{"rows": 0, "cols": 3, "data": []}')
    assert A.shape == (0, 3)
    assert parse_matrix(format_matrix(A)).shape == (0, 3)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "1 2\n3\n",
        "1 x\n",
        "1 nan\n",
        '{"rows": 2, "cols": 1, "data": [[1]]}',
        '{"rows": 1}',
        "{not json",
    ],
)
def test_malformed(text):
    with pytest.raises(MatrixFileError):
        parse_matrix(text)


def test_text_format_cannot_hold_empty():
    with pytest.raises(MatrixFileError):
        format_matrix(np.zeros((0, 2)), "text")


def test_read_vector_shape(tmp_path):
    (tmp_path / "v.txt").write_text("1\n2\n3\n")
    assert read_vector(tmp_path / "v.txt").shape == (3,)
    (tmp_path / "m.txt").write_text("1 2\n3 4\n")
    with pytest.raises(MatrixFileError):
        read_vector(tmp_path / "m.txt")


def test_certificate_layout():
    doc = make_certificate("projection", {"Q": np.eye(2)}, "feasible", np.ones((1, 1)),
                           {"min_eig": float("inf")}, DEFAULT_TOL)
    assert set(doc) == {"kind", "problem", "verdict", "witness", "diagnostics",
                        "tolerances", "tool_version"}
    assert doc["diagnostics"]["min_eig"] is None  # strict JSON has no infinity
    text = dump_json(doc)
    back = json.loads(text)
    assert np.array_equal(matrix_from_obj(back["witness"]), np.ones((1, 1)))
    assert back["tolerances"]["tol_psd"] == DEFAULT_TOL.tol_psd
