import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from textenvs.core import DimensionMismatch, ParseError, UnknownLabel
from textenvs.featurize import (
    START_LABEL,
    EmbeddingStore,
    bow_labels,
    cosine,
    featurize_mlc,
    featurize_qa_informed,
    featurize_qa_simple,
    featurize_seqtag,
    hash_store,
    load_embeddings,
    one_hot,
    save_embeddings,
    tokenize,
)


def small_store(policy="zeros"):
    table = {
        "the": np.array([0.1, 0.2]),
        "cat": np.array([0.3, 0.4]),
        "sat": np.array([0.5, 0.6]),
    }
    return EmbeddingStore(2, table, oov_policy=policy)


class TestLoadEmbeddings:
    def test_plain_lines(self):
        store = load_embeddings(io.StringIO("the 0.1 0.2\ncat 0.3 0.4\n"))
        assert store.dimension == 2
        assert np.array_equal(store.embed("the"), [0.1, 0.2])
        assert np.array_equal(store.embed("cat"), [0.3, 0.4])

    def test_header_skipped(self):
        with_header = load_embeddings(io.StringIO("2 2\nthe 0.1 0.2\ncat 0.3 0.4\n"))
        without = load_embeddings(io.StringIO("the 0.1 0.2\ncat 0.3 0.4\n"))
        assert with_header.dimension == without.dimension
        assert with_header.table.keys() == without.table.keys()

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            load_embeddings(io.StringIO("a 0.1 0.2\nb 0.1 0.2 0.3\n"))

    def test_parse_error_carries_line(self):
        with pytest.raises(ParseError) as err:
            load_embeddings(io.StringIO("a 0.1 0.2\nb 0.1 nope\n"))
        assert err.value.line == 2

    def test_duplicates_keep_first(self):
        store = load_embeddings(io.StringIO("a 1 2\na 3 4\n"))
        assert np.array_equal(store.embed("a"), [1.0, 2.0])

    def test_round_trip(self):
        store = small_store()
        sink = io.StringIO()
        save_embeddings(store, sink)
        reloaded = load_embeddings(io.StringIO(sink.getvalue()))
        assert reloaded.table.keys() == store.table.keys()
        for token in store.table:
            assert np.array_equal(reloaded.embed(token), store.embed(token))


class TestEmbedToken:
    def test_known_token(self):
        assert np.array_equal(small_store().embed("cat"), [0.3, 0.4])

    def test_lowercase_fallback(self):
        assert np.array_equal(small_store().embed("CAT"), [0.3, 0.4])

    def test_oov_zeros(self):
        assert np.array_equal(small_store().embed("dog"), [0.0, 0.0])

    def test_oov_hash_deterministic_unit(self):
        store = hash_store(8, seed=3)
        v1, v2 = store.embed("dog"), store.embed("dog")
        assert np.array_equal(v1, v2)
        assert np.isclose(np.linalg.norm(v1), 1.0)
        assert not np.array_equal(v1, store.embed("cat"))

    def test_hash_depends_on_seed(self):
        assert not np.array_equal(
            hash_store(8, seed=1).embed("dog"), hash_store(8, seed=2).embed("dog")
        )


class TestPooling:
    def test_single_token(self):
        store = small_store()
        assert np.array_equal(store.pool(["cat"]), store.embed("cat"))

    def test_mean_of_two(self):
        store = small_store()
        want = (store.embed("the") + store.embed("cat")) / 2
        assert np.allclose(store.pool(["the", "cat"]), want)

    def test_empty_is_zero(self):
        assert np.array_equal(small_store().pool([]), [0.0, 0.0])


class TestOneHotAndBow:
    def test_one_hot(self):
        assert np.array_equal(one_hot(["PER", "LOC", "O"], "LOC"), [0, 1, 0, 0])

    def test_start_sentinel_slot(self):
        assert np.array_equal(one_hot(["PER", "LOC", "O"], START_LABEL), [0, 0, 0, 1])

    def test_unknown_label(self):
        with pytest.raises(UnknownLabel):
            one_hot(["PER", "LOC", "O"], "MISC")

    def test_bow(self):
        assert np.array_equal(bow_labels(["a", "b", "c"], ["c", "a"]), [1, 0, 1])
        assert np.array_equal(bow_labels(["a", "b", "c"], []), [0, 0, 0])
        assert np.array_equal(bow_labels(["a", "b", "c"], ["a", "a"]), [1, 0, 0])

    def test_bow_unknown(self):
        with pytest.raises(UnknownLabel):
            bow_labels(["a"], ["z"])


class TestTaskFeaturizers:
    def test_seqtag_layout(self):
        store = EmbeddingStore(3, {"w": np.array([1.0, 2.0, 3.0])})
        fv = featurize_seqtag(store, ["T0", "T1"], "w", "T1")
        assert len(fv) == 6
        assert [tuple(s) for s in fv.layout] == [("word", 0, 3), ("prev_label", 3, 3)]
        assert np.array_equal(fv.segment("word"), [1.0, 2.0, 3.0])
        assert np.array_equal(fv.segment("prev_label"), [0, 1, 0])

    def test_seqtag_start(self):
        fv = featurize_seqtag(small_store(), ["T0"], "the", START_LABEL)
        assert np.array_equal(fv.segment("prev_label"), [0, 1])

    def test_seqtag_pure(self):
        a = featurize_seqtag(small_store(), ["T0"], "cat", "T0")
        b = featurize_seqtag(small_store(), ["T0"], "cat", "T0")
        assert np.array_equal(a.values, b.values)

    def test_mlc_layout(self):
        fv = featurize_mlc(small_store(), ["x", "y", "z"], "the cat", ["y"])
        assert len(fv) == 5
        assert np.array_equal(fv.segment("labels"), [0, 1, 0])
        assert np.allclose(
            fv.segment("sentence"), (small_store().embed("the") + small_store().embed("cat")) / 2
        )

    def test_mlc_empty_labels(self):
        fv = featurize_mlc(small_store(), ["x", "y"], "cat", [])
        assert np.array_equal(fv.segment("labels"), [0, 0])

    def test_qa_simple_layout(self):
        fv = featurize_qa_simple(small_store(), "the cat", "sat", ["the sat"])
        assert len(fv) == 6
        assert [s.name for s in fv.layout] == ["question", "choice", "facts"]

    def test_qa_simple_empty_facts(self):
        fv = featurize_qa_simple(small_store(), "the", "cat", [])
        assert np.array_equal(fv.segment("facts"), [0.0, 0.0])

    def test_qa_informed_is_2d(self):
        fv = featurize_qa_informed(small_store(), "the cat", "the cat", ["sat"])
        assert len(fv) == 2
        assert fv.values[0] == pytest.approx(1.0)

    def test_qa_informed_orthogonal(self):
        store = EmbeddingStore(2, {"e1": np.array([1.0, 0.0]), "e2": np.array([0.0, 1.0])})
        fv = featurize_qa_informed(store, "e1", "e2", [])
        assert fv.values[0] == 0.0
        assert fv.values[1] == 0.0  # zero facts vector

    def test_qa_informed_oov_choice_is_zero(self):
        fv = featurize_qa_informed(small_store(), "the", "zzz", ["cat"])
        assert np.array_equal(fv.values, [0.0, 0.0])

    def test_qa_informed_choice_rescale_invariant(self):
        store = EmbeddingStore(
            2, {"c": np.array([1.0, 2.0]), "big": np.array([5.0, 10.0]), "q": np.array([2.0, 1.0])}
        )
        small = featurize_qa_informed(store, "q", "c", ["q"])
        large = featurize_qa_informed(store, "q", "big", ["q"])  # 5x the choice vector
        assert np.allclose(small.values, large.values)


class TestCosine:
    def test_zero_vector_convention(self):
        assert cosine(np.zeros(3), np.ones(3)) == 0.0

    @given(
        st.lists(st.floats(-10, 10), min_size=3, max_size=3),
        st.lists(st.floats(-10, 10), min_size=3, max_size=3),
    )
    def test_bounds(self, a, b):
        value = cosine(np.array(a), np.array(b))
        assert -1.0 - 1e-12 <= value <= 1.0 + 1e-12

    @given(st.floats(0.1, 100.0))
    def test_scale_invariance(self, scale):
        a, b = np.array([1.0, 2.0, -1.0]), np.array([0.5, -1.0, 2.0])
        assert cosine(a * scale, b) == pytest.approx(cosine(a, b))


def test_tokenize_splits_punctuation():
    assert tokenize("the cat, sat.") == ["the", "cat", ",", "sat", "."]
    assert tokenize("") == []
