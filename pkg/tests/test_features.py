"""Surface feature extraction and schema handling."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mtloop.errors import DimensionMismatch
from mtloop.features import (
    SURFACE_FEATURE_NAMES,
    SURFACE_SCHEMA_VERSION,
    FeatureVector,
    assemble,
    assembled_schema_version,
    extract_surface,
    feature_schema_json,
    schema_checksum,
)


def by_name(fv, name):
    return fv.values[fv.names.index(name)]


class TestExtractSurface:
    def test_hand_counted_example(self):
        fv = extract_surface("Hello world", "Hallo Welt")
        assert by_name(fv, "src_token_count") == 2
        assert by_name(fv, "src_char_count") == 11  # includes the space
        assert by_name(fv, "src_mean_token_len") == 5.0
        assert by_name(fv, "hyp_token_count") == 2
        assert by_name(fv, "hyp_char_count") == 10
        assert len(fv) == 15

    def test_both_empty_guards(self):
        fv = extract_surface("", "")
        assert by_name(fv, "src_token_count") == 0
        assert by_name(fv, "hyp_char_count") == 0
        assert by_name(fv, "token_count_ratio") == 1.0
        assert by_name(fv, "char_count_ratio") == 1.0
        assert by_name(fv, "src_type_token_ratio") == 0.0
        assert by_name(fv, "abs_char_delta") == 0.0

    def test_identical_sides(self):
        fv = extract_surface("same text here", "same text here")
        assert by_name(fv, "token_count_ratio") == 1.0
        assert by_name(fv, "char_count_ratio") == 1.0
        assert by_name(fv, "abs_char_delta") == 0.0

    def test_punctuation_and_digits(self):
        fv = extract_surface("a, b! 42", "x 7")
        assert by_name(fv, "src_punct_count") == 2
        assert by_name(fv, "src_digit_count") == 2
        assert by_name(fv, "hyp_digit_count") == 1

    def test_type_token_ratio(self):
        fv = extract_surface("a a b", "x y z")
        assert by_name(fv, "src_type_token_ratio") == pytest.approx(2 / 3)
        assert by_name(fv, "hyp_type_token_ratio") == 1.0

    def test_determinism(self):
        a = extract_surface("Ein Text", "un texte")
        b = extract_surface("Ein Text", "un texte")
        assert a == b


class TestAssemble:
    def test_concatenation(self):
        surface = extract_surface("hello", "bonjour")
        out = assemble(surface, [0.1] * 8, embedding_dim=8)
        assert len(out) == 23
        assert out.names[-8:] == tuple(f"emb_{i}" for i in range(8))
        assert out.schema_version == assembled_schema_version(8)

    def test_absent_embedding_is_identity(self):
        surface = extract_surface("hello", "bonjour")
        assert assemble(surface, None) is surface

    def test_dimension_mismatch(self):
        surface = extract_surface("hello", "bonjour")
        with pytest.raises(DimensionMismatch):
            assemble(surface, [0.1] * 7, embedding_dim=8)

    def test_version_bumps_with_dimension(self):
        surface = extract_surface("hello", "bonjour")
        v8 = assemble(surface, [0.0] * 8, embedding_dim=8)
        v16 = assemble(surface, [0.0] * 16, embedding_dim=16)
        assert v8.schema_version != v16.schema_version
        assert v8.schema_version != SURFACE_SCHEMA_VERSION


class TestSchema:
    def test_checksum_detects_name_permutation(self):
        fv = extract_surface("a b", "c d")
        permuted = FeatureVector(
            values=fv.values,
            names=tuple(reversed(fv.names)),
            schema_version=fv.schema_version,
        )
        assert schema_checksum(fv) != schema_checksum(permuted)

    def test_name_value_alignment_enforced(self):
        with pytest.raises(DimensionMismatch):
            FeatureVector(values=(1.0, 2.0), names=("only_one",), schema_version=1)

    def test_schema_export(self):
        import json

        schema = json.loads(feature_schema_json())
        assert schema["names"] == list(SURFACE_FEATURE_NAMES)
        assert schema["schema_version"] == SURFACE_SCHEMA_VERSION
        with_emb = json.loads(feature_schema_json(embedding_dim=4))
        assert with_emb["names"][-1] == "emb_3"


@settings(max_examples=150, deadline=None)
@given(source=st.text(max_size=300), hypothesis=st.text(max_size=300))
def test_all_features_finite_on_arbitrary_text(source, hypothesis):
    import math

    fv = extract_surface(source, hypothesis)
    assert all(math.isfinite(v) for v in fv.values)
    assert fv == extract_surface(source, hypothesis)
