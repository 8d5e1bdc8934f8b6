"""MITRE FiGHT corpus snapshot, deterministic lexical embedder, and vector index.

The embedder is intentionally model-free: lowercase tokenization, a fixed
stopword list, corpus-level smoothed TF-IDF weights, and 64-bit FNV-1a
feature hashing into 1024 signed buckets. Identical input text always
produces a bit-identical vector, which is what makes the retrieval test
suite reproducible. Remote embedding backends can be plugged in behind the
same ``embed`` contract.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DuplicateTechniqueId,
    EmptyCorpus,
    EmptyIndex,
    FileUnreadable,
    SchemaViolation,
    UnknownTechniqueId,
)

DIMENSION = 1024

_TOKEN_RE = re.compile(r"[a-z0-9]+")
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_DEFAULT_STOPWORDS = Path(__file__).parent / "data" / "stopwords.txt"


@dataclass(frozen=True)
class Mitigation:
    mitigation_id: str
    name: str
    guidance: str


@dataclass(frozen=True)
class FightTechnique:
    technique_id: str
    name: str
    description: str
    tactic_ids: tuple[str, ...]
    mitigations: tuple[Mitigation, ...]
    source_version: str

    @property
    def index_text(self) -> str:
        return f"{self.name} {self.description}"


@dataclass
class Corpus:
    version: str
    techniques: list[FightTechnique]
    _by_id: dict[str, FightTechnique] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self._by_id = {t.technique_id: t for t in self.techniques}

    def __len__(self) -> int:
        return len(self.techniques)

    def get_technique(self, technique_id: str) -> FightTechnique:
        try:
            return self._by_id[technique_id]
        except KeyError:
            raise UnknownTechniqueId(technique_id) from None

    def get_mitigations(self, technique_id: str) -> list[Mitigation]:
        return list(self.get_technique(technique_id).mitigations)


@dataclass(frozen=True)
class RetrievalResult:
    technique_id: str
    score: float
    rank: int


_TECHNIQUE_ID_RE = re.compile(r"^FGT\d+(\.\d+)?$")


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    p = Path(path) if path is not None else _DEFAULT_STOPWORDS
    return frozenset(
        line.strip() for line in p.read_text(encoding="utf-8").splitlines() if line.strip()
    )


def tokenize(text: str, stopwords: frozenset[str] = frozenset()) -> list[str]:
    return [t for t in _TOKEN_RE.findall(text.lower()) if t not in stopwords]


def fnv1a_64(token: str) -> int:
    h = _FNV_OFFSET
    for byte in token.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def load_corpus(path: str | Path) -> Corpus:
    """Load a corpus snapshot file; duplicate technique IDs are fatal."""
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FileUnreadable(f"cannot read corpus snapshot {path}: {exc}") from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaViolation(-1, "<document>", f"not valid JSON: {exc}") from exc

    if not isinstance(doc, dict) or not isinstance(doc.get("techniques"), list):
        raise SchemaViolation(-1, "techniques", "missing techniques array")
    version = str(doc.get("version", "unversioned"))

    techniques: list[FightTechnique] = []
    seen: set[str] = set()
    for i, rec in enumerate(doc["techniques"]):
        if not isinstance(rec, dict):
            raise SchemaViolation(i, "<record>", "not an object")
        tid = rec.get("technique_id")
        if not isinstance(tid, str) or not _TECHNIQUE_ID_RE.match(tid):
            raise SchemaViolation(i, "technique_id", f"bad id {tid!r}")
        if tid in seen:
            raise DuplicateTechniqueId(tid)
        seen.add(tid)
        name = rec.get("name")
        desc = rec.get("description")
        if not isinstance(name, str) or not name:
            raise SchemaViolation(i, "name")
        if not isinstance(desc, str) or not desc.strip():
            raise SchemaViolation(i, "description", "description is embedded text, must be non-empty")
        mitigations = []
        for j, m in enumerate(rec.get("mitigations", [])):
            mid = m.get("mitigation_id")
            guidance = m.get("guidance")
            if not isinstance(mid, str) or not mid:
                raise SchemaViolation(i, f"mitigations[{j}].mitigation_id")
            if not isinstance(guidance, str) or not guidance.strip():
                raise SchemaViolation(i, f"mitigations[{j}].guidance")
            mitigations.append(Mitigation(mid, str(m.get("name", mid)), guidance))
        techniques.append(
            FightTechnique(
                technique_id=tid,
                name=name,
                description=desc,
                tactic_ids=tuple(str(t) for t in rec.get("tactic_ids", [])),
                mitigations=tuple(mitigations),
                source_version=version,
            )
        )
    return Corpus(version=version, techniques=techniques)


class LexicalEmbedder:
    """Deterministic TF-IDF feature-hashing embedder.

    IDF is frozen at construction from the corpus the index was built over;
    queries never shift the weights.
    """

    def __init__(self, stopwords: frozenset[str], idf: dict[str, float], n_docs: int):
        self.stopwords = stopwords
        self.idf = idf
        self.n_docs = n_docs

    @classmethod
    def from_corpus(cls, corpus: Corpus, stopwords: frozenset[str]) -> "LexicalEmbedder":
        df: dict[str, int] = {}
        for tech in corpus.techniques:
            for tok in set(tokenize(tech.index_text, stopwords)):
                df[tok] = df.get(tok, 0) + 1
        n = len(corpus.techniques)
        idf = {tok: math.log((1 + n) / (1 + d)) + 1.0 for tok, d in df.items()}
        return cls(stopwords, idf, n)

    def _idf(self, token: str) -> float:
        # Unseen tokens get the df=0 smoothed weight.
        return self.idf.get(token, math.log(1 + self.n_docs) + 1.0)

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(DIMENSION, dtype=np.float64)
        counts: dict[str, int] = {}
        for tok in tokenize(text, self.stopwords):
            counts[tok] = counts.get(tok, 0) + 1
        for tok, tf in counts.items():
            h = fnv1a_64(tok)
            sign = -1.0 if (h >> 63) & 1 else 1.0
            vec[h % DIMENSION] += sign * tf * self._idf(tok)
        norm = np.linalg.norm(vec)
        if norm > 0.0:
            vec /= norm
        return vec


class VectorIndex:
    """Immutable linear-scan cosine index over a corpus.

    Built once, then read-only; safe for any number of concurrent readers.
    """

    def __init__(self, ids: list[str], matrix: np.ndarray, corpus_version: str,
                 embedder: LexicalEmbedder):
        self.ids = ids
        self.matrix = matrix
        self.dimension = DIMENSION
        self.corpus_version = corpus_version
        self.embedder = embedder

    def __len__(self) -> int:
        return len(self.ids)

    def search(self, query: str, k: int) -> list[RetrievalResult]:
        if len(self.ids) == 0:
            raise EmptyIndex("index has no entries")
        if k < 1:
            raise ValueError("k must be >= 1")
        q = self.embedder.embed(query)
        scores = self.matrix @ q
        order = sorted(range(len(self.ids)), key=lambda i: (-scores[i], self.ids[i]))
        top = order[: min(k, len(order))]
        return [
            RetrievalResult(technique_id=self.ids[i], score=float(scores[i]), rank=r + 1)
            for r, i in enumerate(top)
        ]


def build_index(corpus: Corpus, stopwords: frozenset[str] | None = None) -> VectorIndex:
    if len(corpus) == 0:
        raise EmptyCorpus("cannot index an empty corpus")
    sw = stopwords if stopwords is not None else load_stopwords()
    embedder = LexicalEmbedder.from_corpus(corpus, sw)
    matrix = np.stack([embedder.embed(t.index_text) for t in corpus.techniques])
    return VectorIndex(
        ids=[t.technique_id for t in corpus.techniques],
        matrix=matrix,
        corpus_version=corpus.version,
        embedder=embedder,
    )
