"""Text normalization and synonym word coding for weakness descriptions.

The pipeline order is: lowercase -> strip punctuation/special characters ->
drop stop words -> Porter-stem -> replace coded word groups. Codebooks are
built from CWE alternative terms, glossary term groups and optional manual
overrides; phrases are stored stemmed so inflectional variants still match.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

from sklearn.base import BaseEstimator, TransformerMixin

from .porter import stem

_TOKEN_SPLIT = re.compile(r"[^a-z0-9]+")

Phrase = tuple[str, ...]


class CodebookError(ValueError):
    """Raised when a codebook cannot be built consistently."""


def load_default_stopwords() -> frozenset[str]:
    text = resources.files("threatpath.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w for w in text.split() if w)


def stopword_list_checksum() -> str:
    """SHA-256 of the vendored stop-word file, for config audits."""
    raw = resources.files("threatpath.data").joinpath("stopwords.txt").read_bytes()
    return hashlib.sha256(raw).hexdigest()


def normalize(text: str, stopwords: frozenset[str] | None = None, use_stemmer: bool = True) -> list[str]:
    """Normalize free text into a clean token stream.

    Empty input yields an empty stream. The output is a fixed point:
    normalizing the re-joined output returns the same tokens.
    """
    if stopwords is None:
        stopwords = _DEFAULT_STOPWORDS
    tokens = []
    for raw in _TOKEN_SPLIT.split(text.lower()):
        if not raw or raw in stopwords:
            continue
        token = stem(raw) if use_stemmer else raw
        if token and token not in stopwords:
            tokens.append(token)
    return tokens


_DEFAULT_STOPWORDS = load_default_stopwords()


class TextNormalizer(BaseEstimator, TransformerMixin):
    """Stateless transformer wrapping :func:`normalize` for pipeline use."""

    def __init__(self, stopwords: frozenset[str] | None = None, use_stemmer: bool = True):
        self.stopwords = stopwords
        self.use_stemmer = use_stemmer

    def fit(self, X, y=None):
        return self

    def transform(self, X: Iterable[str]) -> list[list[str]]:
        sw = self.stopwords if self.stopwords is not None else _DEFAULT_STOPWORDS
        return [normalize(text, stopwords=sw, use_stemmer=self.use_stemmer) for text in X]


@dataclass
class SynonymGroup:
    """One coded group: occurrences of any phrase are replaced by the code word."""

    code_word: str
    phrases: list[Phrase]
    provenance: str  # alternative_terms | glossary | manual
    owner: str = ""  # e.g. "CWE-119" or "glossary:<key>"


@dataclass
class SynonymCodebook:
    groups: list[SynonymGroup] = field(default_factory=list)

    def __post_init__(self):
        # longest phrase first inside each group; deterministic global index
        for g in self.groups:
            g.phrases.sort(key=lambda p: (-len(p), p))
        self._by_first: dict[str, list[tuple[Phrase, str]]] = {}
        self._all_phrases: dict[Phrase, str] = {}
        for g in self.groups:
            for p in g.phrases:
                self._all_phrases[p] = g.code_word
                self._by_first.setdefault(p[0], []).append((p, g.code_word))
        for cands in self._by_first.values():
            cands.sort(key=lambda item: (-len(item[0]), item[0]))

    def __len__(self) -> int:
        return len(self.groups)

    def apply(self, tokens: Sequence[str]) -> list[str]:
        """Longest-match-first, left-to-right replacement of phrases by codes."""
        out: list[str] = []
        i = 0
        n = len(tokens)
        while i < n:
            cands = self._by_first.get(tokens[i])
            matched = False
            if cands:
                for phrase, code in cands:
                    k = len(phrase)
                    if i + k <= n and tuple(tokens[i : i + k]) == phrase:
                        out.append(code)
                        i += k
                        matched = True
                        break
            if not matched:
                out.append(tokens[i])
                i += 1
        return out

    def export_text(self) -> str:
        """Columnar export: code <TAB> provenance <TAB> owner <TAB> phrases (comma-joined)."""
        lines = ["# code\tprovenance\towner\tphrases"]
        for g in sorted(self.groups, key=lambda g: (g.owner, g.code_word)):
            phrases = ",".join(" ".join(p) for p in g.phrases)
            lines.append(f"{g.code_word}\t{g.provenance}\t{g.owner}\t{phrases}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_export_text(cls, text: str) -> "SynonymCodebook":
        groups = []
        for line in text.splitlines():
            if not line or line.startswith("#"):
                continue
            code, provenance, owner, phrases = line.split("\t")
            parsed = [tuple(p.split()) for p in phrases.split(",") if p]
            groups.append(SynonymGroup(code, parsed, provenance, owner))
        return cls(groups)


def _normalize_phrase(raw: str, stopwords: frozenset[str]) -> Phrase:
    return tuple(normalize(raw, stopwords=stopwords))


def _owner_sort_key(owner: str) -> tuple:
    # CWE owners win ties by lowest numeric id, then glossary/manual keys by name
    m = re.fullmatch(r"CWE-(\d+)", owner)
    if m:
        return (0, int(m.group(1)), owner)
    return (1, 0, owner)


def build_codebook(
    cwes: Iterable,
    glossary: Iterable[Sequence[str]] = (),
    manual: Iterable[Sequence[str]] | None = None,
    stopwords: frozenset[str] | None = None,
) -> SynonymCodebook:
    """Build a codebook from CWE alternative terms plus glossary/manual groups.

    Each group's member phrases are normalized (stemmed) before storage and the
    group is augmented with the single words of its phrases, so any member word
    alone is also replaced by the code. The code word is the group's single-word
    member when one exists, otherwise the first token of its first phrase.
    A phrase claimed by two groups goes to the owner with the lowest CWE id
    (glossary after CWE, manual last); an explicit manual duplicate is an error.
    """
    sw = stopwords if stopwords is not None else _DEFAULT_STOPWORDS
    raw_groups: list[tuple[str, str, list[Phrase]]] = []  # (owner, provenance, phrases)

    for cwe in cwes:
        terms = getattr(cwe, "alternative_terms", None) or []
        phrases = [p for p in (_normalize_phrase(t, sw) for t in terms) if p]
        if phrases:
            raw_groups.append((f"CWE-{cwe.id}", "alternative_terms", phrases))

    for idx, terms in enumerate(glossary):
        phrases = [p for p in (_normalize_phrase(t, sw) for t in terms) if p]
        if phrases:
            key = " ".join(min(phrases))
            raw_groups.append((f"glossary:{idx:03d}:{key}", "glossary", phrases))

    for idx, terms in enumerate(manual or ()):
        phrases = [p for p in (_normalize_phrase(t, sw) for t in terms) if p]
        if phrases:
            key = " ".join(min(phrases))
            raw_groups.append((f"manual:{idx:03d}:{key}", "manual", phrases))

    raw_groups.sort(key=lambda item: _owner_sort_key(item[0]))

    # two-level claims: each member WORD and each multi-word phrase belongs to
    # exactly one group, first (lowest CWE id) claimant wins. A group only keeps
    # a multi-word phrase whose every word it owns; this makes coding provably
    # idempotent because coded output can never re-form a phrase.
    word_owner: dict[str, str] = {}
    phrase_owner: dict[Phrase, str] = {}
    for owner, provenance, phrases in raw_groups:
        for p in phrases:
            prior = phrase_owner.get(p)
            if prior is not None and prior != owner:
                if provenance == "manual":
                    raise CodebookError(
                        f"phrase {' '.join(p)!r} already assigned to {prior}, "
                        f"conflicting manual group {owner}"
                    )
                continue
            phrase_owner[p] = owner
            for w in p:
                word_owner.setdefault(w, owner)

    groups: list[SynonymGroup] = []
    for owner, provenance, phrases in raw_groups:
        singles = sorted({w for p in phrases for w in p if word_owner.get(w) == owner})
        if not singles:
            continue
        code = singles[0]
        kept: list[Phrase] = [(w,) for w in singles]
        for p in phrases:
            if len(p) < 2 or phrase_owner.get(p) != owner:
                continue
            if any(word_owner.get(w) != owner for w in p):
                continue
            if set(p) == {code}:
                continue  # degenerate repeated-code phrase would break idempotence
            kept.append(p)
        groups.append(SynonymGroup(code, sorted(set(kept), key=lambda p: (-len(p), p)), provenance, owner))

    return SynonymCodebook(groups)


def parse_glossary(text: str) -> list[list[str]]:
    """Glossary file: one term group per line, phrases tab-separated."""
    groups = []
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        phrases = [t.strip() for t in line.split("\t") if t.strip()]
        if phrases:
            groups.append(phrases)
    return groups


def apply_synonym_coding(tokens: Sequence[str], codebook: SynonymCodebook) -> list[str]:
    """Replace coded phrases in an already-normalized stream."""
    return codebook.apply(tokens)


class SynonymCoder(BaseEstimator, TransformerMixin):
    """Transformer applying a fixed codebook to token streams."""

    def __init__(self, codebook: SynonymCodebook | None = None):
        self.codebook = codebook

    def fit(self, X, y=None):
        return self

    def transform(self, X: Iterable[Sequence[str]]) -> list[list[str]]:
        if self.codebook is None or len(self.codebook) == 0:
            return [list(tokens) for tokens in X]
        return [self.codebook.apply(tokens) for tokens in X]
