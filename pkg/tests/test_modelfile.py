import json

import numpy as np
import pytest

from nordengeom.errors import AntisymmetryViolation, JacobiViolation, NotAlmostComplex, ParseError
from nordengeom.generator import canonical_norden, generate
from nordengeom.modelfile import (
    brackets_from_records,
    dumps,
    model_from_raw,
    model_to_dict,
    parse_model,
    records_from_brackets,
)


def doc_for(records, J=None, dim=4):
    s = canonical_norden(dim)
    return json.dumps({
        "dim": dim,
        "structure_constants": records,
        "metric": s.g.tolist(),
        "J": (s.J if J is None else J).tolist(),
    })


def test_records_complete_antisymmetry():
    C = brackets_from_records(4, [[0, 1, 2, 1.5]])
    assert C[0, 1, 2] == 1.5 and C[1, 0, 2] == -1.5


def test_consistent_duplicate_accepted_conflict_rejected():
    brackets_from_records(4, [[0, 1, 2, 1.0], [1, 0, 2, -1.0]])
    with pytest.raises(ParseError, match="conflicting"):
        brackets_from_records(4, [[0, 1, 2, 1.0], [1, 0, 2, 1.0]])


@pytest.mark.parametrize("rec", [[0, 1, 4, 1.0], [0, 1, 2], [0, 1, 2, "x"], [0.5, 1, 2, 1.0],
                                 [0, 1, 2, float("nan")]])
def test_bad_records(rec):
    with pytest.raises(ParseError):
        brackets_from_records(4, [rec])


def test_diagonal_bracket_is_antisymmetry_violation():
    with pytest.raises(AntisymmetryViolation):
        brackets_from_records(4, [[1, 1, 2, 1.0]])


def test_round_trip_is_bit_exact(w3_models):
    for m in w3_models:
        text = dumps(model_to_dict(m))
        m2 = model_from_raw(parse_model(text))
        np.testing.assert_array_equal(m2.algebra.structure_constants, m.algebra.structure_constants)
        np.testing.assert_array_equal(m2.structure.g, m.structure.g)
        np.testing.assert_array_equal(m2.structure.J, m.structure.J)
        assert dumps(model_to_dict(m2)) == text


def test_records_are_upper_triangle_nonzero():
    m = generate("w3", 4, 1)
    for i, j, k, v in records_from_brackets(m.algebra.structure_constants):
        assert i < j and v != 0.0


@pytest.mark.parametrize("text", ["", "[1, 2]", '{"dim": 3}', '{"dim": 4}',
                                  '{"dim": 4, "metric": [[1]], "J": [[1]]}'])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_model(text)


def test_invalid_geometry_is_not_a_parse_error():
    raw = parse_model(doc_for([], J=np.eye(4)))
    with pytest.raises(NotAlmostComplex):
        model_from_raw(raw)
    bad = [[0, 1, 1, 1.0], [1, 2, 0, 1.0]]
    with pytest.raises(JacobiViolation):
        model_from_raw(parse_model(doc_for(bad)))


def test_dumps_refuses_nan():
    with pytest.raises(ValueError):
        dumps({"x": float("nan")})
