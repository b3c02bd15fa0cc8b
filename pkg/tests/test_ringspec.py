import json

import pytest

from homcert.algebra import verify_local
from homcert.errors import NotAssociative, NotLocal, ParseError
from homcert.ringspec import algebra_from_spec, load_ring, parse_ring_spec, preset_spec, square_zero_spec

from conftest import trunc


def test_truncated_preset_document():
    a = algebra_from_spec('{"field":{"p":2},"type":"truncated_polynomial","exponent":2}')
    assert a.mult_table() == trunc(2, 2).mult_table()


def test_explicit_table_matches_preset():
    doc = {
        "field": {"p": 2}, "type": "structure_constants", "dim": 2, "basis_labels": ["1", "x"],
        "mult_table": [[0, 0, 0, 1], [0, 1, 1, 1], [1, 0, 1, 1]], "unit": [1, 0], "maxideal_basis": [[0, 1]],
    }
    assert algebra_from_spec(json.dumps(doc)).mult_table() == trunc(2, 2).mult_table()


def test_square_zero_document_is_local():
    assert verify_local(algebra_from_spec(square_zero_spec(2, 2))).nilpotency_index == 2


@pytest.mark.parametrize(
    "doc,where",
    [
        ('{"field":{"p":4},"type":"truncated_polynomial","exponent":2}', "field.p"),
        ('{"field":{"p":2},"type":"cubic"}', "type"),
        ('{"field":{"p":2},"type":"truncated_polynomial"}', "<root>"),
        ('{"field":{"p":2},"type":"truncated_polynomial","exponent":1}', "exponent"),
        ('{"field":{"p":2},\n"type":', "line 2"),
    ],
)
def test_parse_errors_carry_location(doc, where):
    with pytest.raises(ParseError) as info:
        parse_ring_spec(doc)
    assert info.value.location.startswith(where)


def test_bad_table_index():
    doc = square_zero_spec(2, 2)
    doc["mult_table"].append([0, 5, 1, 1])
    with pytest.raises(ParseError) as info:
        parse_ring_spec(doc)
    assert info.value.location == f"mult_table[{len(doc['mult_table']) - 1}]"


def test_invariant_failures():
    doc = square_zero_spec(2, 2)
    doc["unit"] = [0, 1, 0]
    with pytest.raises(NotAssociative):
        algebra_from_spec(doc)
    doc = square_zero_spec(2, 2)
    doc["mult_table"].append([1, 1, 1, 1])  # x^2 = x
    with pytest.raises(NotLocal):
        algebra_from_spec(doc)


def test_presets_and_files(tmp_path):
    a, _ = load_ring("trunc:3", 3)
    assert a.dim == 3
    assert load_ring("field", 5)[0].dim == 1
    path = tmp_path / "ring.json"
    path.write_text(json.dumps(preset_spec("sq0:2", 3)))
    assert load_ring(str(path), 2)[0].p == 3
    with pytest.raises(ParseError):
        load_ring("poly:2", 2)
    with pytest.raises(ParseError):
        load_ring("trunc:2", 6)
