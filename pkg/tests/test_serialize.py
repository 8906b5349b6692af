import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lamcomm.classes import classify
from lamcomm.errors import MatrixFileError
from lamcomm.harness import verify
from lamcomm.linalg import DEFAULT_TOL
from lamcomm.serialize import (
    class_report_doc,
    dumps,
    loads,
    matrix_from_doc,
    matrix_to_doc,
    read_matrix,
    report_document,
    to_jsonable,
    write_matrix,
)

finite = st.floats(allow_nan=False, allow_infinity=False)


@settings(max_examples=50)
@given(st.lists(st.tuples(finite, finite), min_size=4, max_size=4))
def test_matrix_round_trip_is_bit_exact(vals):
    m = np.array([complex(a, b) for a, b in vals]).reshape(2, 2)
    back = matrix_from_doc(loads(dumps(matrix_to_doc(m))))
    assert back.tobytes() == m.astype(np.complex128).tobytes()


def test_non_finite_floats_become_strings():
    assert to_jsonable([math.inf, -math.inf, 1.5]) == ["inf", "-inf", 1.5]
    assert to_jsonable(math.nan) == "nan"
    assert to_jsonable(1 + 2j) == [1.0, 2.0]


@pytest.mark.parametrize("doc, fragment", [
    ({"dim": 2, "entries": [[[1, 0], [0, 0]]]}, "rows"),
    ({"dim": 2, "entries": [[[1, 0]], [[0, 0]]]}, "square"),
    ({"dim": 1, "entries": [[[1, "x"]]]}, "pair"),
    ({"dim": 1, "entries": [[[1]]]}, "pair"),
    ({"dim": 0, "entries": []}, "dim"),
    ([1, 2], "object"),
])
def test_malformed_documents(doc, fragment):
    with pytest.raises(MatrixFileError, match=fragment):
        matrix_from_doc(doc)


def test_read_matrix_errors(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"dim": 2, "entries": [[[1, 0], [0')
    with pytest.raises(MatrixFileError, match="line 1 column"):
        read_matrix(p)
    p.write_text('{"dim": 1, "entries": [[[NaN, 0]]]}')
    with pytest.raises(MatrixFileError, match="NaN"):
        read_matrix(p)
    with pytest.raises(MatrixFileError, match="cannot read"):
        read_matrix(tmp_path / "missing.json")


def test_write_then_read(tmp_path):
    m = np.array([[1 + 2j, 0.1], [3e-300, -4]])
    write_matrix(tmp_path / "m.json", m)
    assert read_matrix(tmp_path / "m.json").tobytes() == m.tobytes()


def test_reports_are_valid_json():
    J2 = np.array([[0, 1], [0, 0]], dtype=complex)
    doc = report_document(0, DEFAULT_TOL, [class_report_doc(classify(J2)), to_jsonable(verify("modulus", J2, J2))],
                          "0.1.0")
    text = dumps(doc)
    parsed = json.loads(text)
    assert parsed["tolerances"]["psd_tol"] == 1e-9
    assert parsed["results"][0]["classes"]["hyponormal"]["margin"] == -1.0
    assert dumps(loads(text)) == text
