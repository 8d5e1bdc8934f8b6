import json

import numpy as np
import pytest

import oracle
from ranshield import kb
from ranshield.errors import (
    DuplicateTechniqueId,
    EmptyCorpus,
    EmptyIndex,
    FileUnreadable,
    SchemaViolation,
    UnknownTechniqueId,
)
from ranshield.evalkit import FIXTURES_DIR


def _write_corpus(tmp_path, techniques, version="t1"):
    p = tmp_path / "corpus.json"
    p.write_text(json.dumps({"version": version, "techniques": techniques}))
    return p


def _tech(tid, name="Some Attack", desc="a distinctive description of the attack"):
    return {
        "technique_id": tid, "name": name, "description": desc,
        "tactic_ids": [], "mitigations": [
            {"mitigation_id": "M1", "name": "m", "guidance": "do the safe thing"}
        ],
    }


class TestLoadCorpus:
    def test_fixture_contains_null_cipher_technique(self, corpus):
        t = corpus.get_technique("FGT1600.501")
        assert t.name == "Disabling Encryption Over Radio Interface"

    def test_empty_techniques_array(self, tmp_path):
        c = kb.load_corpus(_write_corpus(tmp_path, []))
        assert len(c) == 0

    def test_duplicate_id_rejected(self, tmp_path):
        p = _write_corpus(tmp_path, [_tech("FGT0001"), _tech("FGT0001")])
        with pytest.raises(DuplicateTechniqueId):
            kb.load_corpus(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileUnreadable):
            kb.load_corpus(tmp_path / "nope.json")

    def test_empty_description_rejected(self, tmp_path):
        p = _write_corpus(tmp_path, [_tech("FGT0001", desc="  ")])
        with pytest.raises(SchemaViolation):
            kb.load_corpus(p)

    def test_empty_mitigation_guidance_rejected(self, tmp_path):
        t = _tech("FGT0001")
        t["mitigations"][0]["guidance"] = ""
        with pytest.raises(SchemaViolation):
            kb.load_corpus(_write_corpus(tmp_path, [t]))


class TestLookup:
    def test_get_technique_unknown(self, corpus):
        with pytest.raises(UnknownTechniqueId):
            corpus.get_technique("FGT0000")

    def test_mitigations_preserve_corpus_order(self, corpus):
        mits = corpus.get_mitigations("FGT1600.501")
        assert [m.mitigation_id for m in mits] == ["FGM5097", "FGM5046"]


class TestEmbedder:
    def test_determinism(self, index):
        a = index.embedder.embed("null cipher nea0 disabled over the air")
        b = index.embedder.embed("null cipher nea0 disabled over the air")
        assert np.array_equal(a, b)

    def test_empty_text_is_zero_vector(self, index):
        assert not index.embedder.embed("").any()

    def test_stopword_only_text_is_zero_vector(self, index, stopwords):
        text = " ".join(sorted(stopwords)[:5])
        assert not index.embedder.embed(text).any()

    def test_nonzero_vectors_unit_norm(self, index):
        v = index.embedder.embed("jamming uplink control channel interference")
        assert abs(np.linalg.norm(v) - 1.0) < 1e-9

    def test_cosine_matches_bruteforce_oracle(self, corpus, stopwords):
        # Independent dict-based reimplementation of the whole chain.
        docs = [t.index_text for t in corpus.techniques]
        idf, n = oracle.idf_table(docs, stopwords)
        d1 = corpus.techniques[0].index_text
        d2 = corpus.techniques[5].index_text
        expected = oracle.cosine(
            oracle.embed(d1, idf, n, stopwords), oracle.embed(d2, idf, n, stopwords)
        )
        index = kb.build_index(corpus, stopwords)
        got = float(index.embedder.embed(d1) @ index.embedder.embed(d2))
        assert got == pytest.approx(expected, abs=1e-12)

    def test_fnv1a_known_vector(self):
        # FNV-1a 64-bit reference values.
        assert kb.fnv1a_64("") == 0xCBF29CE484222325
        assert kb.fnv1a_64("a") == 0xAF63DC4C8601EC8C


class TestIndexAndSearch:
    def test_entry_count_and_dimension(self, corpus, index):
        assert len(index) == len(corpus) >= 30
        assert index.matrix.shape == (len(corpus), 1024)

    def test_rebuild_is_bit_identical(self, corpus, index):
        again = kb.build_index(corpus)
        assert np.array_equal(index.matrix, again.matrix)
        assert index.ids == again.ids

    def test_empty_corpus_rejected(self):
        with pytest.raises(EmptyCorpus):
            kb.build_index(kb.Corpus(version="x", techniques=[]))

    def test_self_similarity_rank1_score1(self, corpus, index):
        t = corpus.get_technique("FGT1600.501")
        results = index.search(t.index_text, 3)
        assert results[0].technique_id == "FGT1600.501"
        assert results[0].score == pytest.approx(1.0, abs=1e-9)

    def test_description_only_query_still_rank1(self, corpus, index):
        t = corpus.get_technique("FGT1600.501")
        assert index.search(t.description, 3)[0].technique_id == "FGT1600.501"

    def test_k_larger_than_corpus(self, corpus, index):
        results = index.search("anything at all", len(corpus) + 50)
        assert len(results) == len(corpus)

    def test_zero_vector_query_scores_zero_ordered_by_id(self, corpus, index):
        results = index.search("", len(corpus))
        assert all(r.score == 0.0 for r in results)
        ids = [r.technique_id for r in results]
        assert ids == sorted(ids)

    def test_null_cipher_summary_in_top3(self, scenarios, index):
        sc = next(s for s in scenarios if s.scenario_id == "Null-Cipher-Integrity")
        results = index.search(sc.event["description"], 3)
        assert "FGT1600.501" in [r.technique_id for r in results]

    def test_empty_index_search_raises(self, index):
        empty = kb.VectorIndex([], np.zeros((0, 1024)), "x", index.embedder)
        with pytest.raises(EmptyIndex):
            empty.search("q", 3)


class TestProperties:
    def test_search_is_deterministic(self, corpus, index):
        q = "rogue base station luring devices"
        r1 = index.search(q, 5)
        r2 = index.search(q, 5)
        assert r1 == r2

    def test_self_retrieval_for_every_technique(self, corpus, index):
        for t in corpus.techniques:
            top = index.search(t.index_text, 1)[0]
            assert top.technique_id == t.technique_id
            assert top.score == pytest.approx(1.0, abs=1e-9)

    def test_monotonic_truncation(self, corpus, index):
        q = "identity exposure before authentication"
        for k in range(1, len(corpus)):
            prefix = [r.technique_id for r in index.search(q, k)]
            longer = [r.technique_id for r in index.search(q, k + 1)]
            assert longer[:k] == prefix

    def test_stored_vectors_normalized_and_scores_bounded(self, corpus, index):
        norms = np.linalg.norm(index.matrix, axis=1)
        assert np.all(np.abs(norms - 1.0) < 1e-9)
        results = index.search("unencrypted radio jamming identity paging", len(corpus))
        assert all(-1.0 - 1e-9 <= r.score <= 1.0 + 1e-9 for r in results)

    def test_rankings_match_linear_scan_oracle(self, corpus, index, stopwords):
        docs = [t.index_text for t in corpus.techniques]
        idf, n = oracle.idf_table(docs, stopwords)
        doc_vectors = [
            (t.technique_id, oracle.embed(t.index_text, idf, n, stopwords))
            for t in corpus.techniques
        ]
        for query in ["imsi capture downlink", "reboot configuration drift",
                      "jamming noise uplink", "nea0 nia0 null cipher"]:
            expected = oracle.linear_scan(query, doc_vectors, idf, n, stopwords, 10)
            got = index.search(query, 10)
            assert [r.technique_id for r in got] == [d for d, _ in expected]
            for r, (_, s) in zip(got, expected):
                assert r.score == pytest.approx(s, abs=1e-12)
