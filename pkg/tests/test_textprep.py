"""Normalization, stemming and synonym coding."""

import hashlib

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from threatpath.porter import stem
from threatpath.records import CweEntry
from threatpath.textprep import (
    CodebookError,
    SynonymCodebook,
    SynonymGroup,
    apply_synonym_coding,
    build_codebook,
    load_default_stopwords,
    normalize,
    stopword_list_checksum,
)

STOPWORD_SHA256 = "8802151a6bfa3dd726550b772628bc555ce89c097f9f4ab1e7558a97d3f1d27b"


def test_vendored_stopword_list_is_pinned():
    assert stopword_list_checksum() == STOPWORD_SHA256
    words = load_default_stopwords()
    assert 150 <= len(words) <= 200
    assert "the" in words and "a" in words


def test_porter_known_stems():
    # hand-applied rule traces for the words the normalizer examples rely on
    assert stem("authenticated") == "authent"
    assert stem("remote") == "remot"
    assert stem("detected") == "detect"
    assert stem("vulnerability") == "vulner"
    assert stem("injection") == "inject"
    assert stem("buffer") == "buffer"
    assert stem("overrun") == "overrun"


def test_normalize_db2_phrase():
    # oracle: hand-applied Porter steps; "a" is a stop word, punctuation dropped
    tokens = normalize("A remote, authenticated DB2 user")
    assert tokens == ["remot", "authent", "db2", "user"]


def test_normalize_empty_input():
    assert normalize("") == []


def test_normalize_idempotent_on_rejoined_output():
    text = "Cross-site scripting (XSS) vulnerability allows remote attackers!"
    once = normalize(text)
    assert normalize(" ".join(once)) == once


def test_normalize_case_and_punctuation_invariance():
    a = normalize("Buffer Overflow, in the parser.")
    b = normalize("buffer overflow in the parser")
    assert a == b


def _cwe119():
    return CweEntry(
        id=119,
        name="Improper Restriction of Operations within the Bounds of a Memory Buffer",
        alternative_terms=["buffer overflow", "buffer overrun"],
    )


def test_codebook_from_cwe_alternative_terms():
    book = build_codebook([_cwe119()])
    assert len(book) == 1
    group = book.groups[0]
    assert group.owner == "CWE-119"
    assert group.provenance == "alternative_terms"
    assert ("buffer", "overflow") in group.phrases
    assert ("buffer", "overrun") in group.phrases
    # one shared code that is itself a member word
    members = {w for p in group.phrases for w in p}
    assert group.code_word in members


def test_codebook_empty_inputs():
    assert len(build_codebook([], glossary=[], manual=[])) == 0


def test_manual_override_merges_groups():
    book = build_codebook([], glossary=[], manual=[["privilege escalation", "privesc"]])
    assert len(book) == 1
    assert book.groups[0].provenance == "manual"


def test_conflicting_manual_phrase_is_an_error():
    with pytest.raises(CodebookError) as err:
        build_codebook([_cwe119()], manual=[["buffer overflow", "smash the stack"]])
    assert "buffer overflow" in str(err.value)


def test_duplicate_phrase_across_cwes_goes_to_lowest_id():
    a = CweEntry(id=119, name="x", alternative_terms=["buffer overflow"])
    b = CweEntry(id=120, name="y", alternative_terms=["buffer overflow", "classic overflow"])
    book = build_codebook([a, b])
    owners = {g.owner: g for g in book.groups}
    assert ("buffer", "overflow") in owners["CWE-119"].phrases
    assert all(("buffer", "overflow") != p for p in owners.get("CWE-120", SynonymGroup("", [], "")).phrases)


def test_apply_coding_replaces_phrase_with_code():
    book = build_codebook([_cwe119()])
    code = book.groups[0].code_word
    tokens = normalize("buffer overrun detected")
    assert apply_synonym_coding(tokens, book) == [code, "detect"]


def test_apply_coding_without_matches_is_identity():
    book = build_codebook([_cwe119()])
    tokens = ["sql", "inject", "paramet"]
    assert apply_synonym_coding(tokens, book) == tokens


def test_longest_match_wins():
    groups = [
        SynonymGroup("overflowgroup", [("buffer", "overflow")], "manual", "manual:a"),
        SynonymGroup("stackgroup", [("stack", "buffer", "overflow")], "manual", "manual:b"),
    ]
    book = SynonymCodebook(groups)
    out = book.apply(["stack", "buffer", "overflow"])
    # oracle: the only 3-token window matches both; the longer phrase wins
    assert out == ["stackgroup"]


def test_output_never_longer_and_tokens_from_known_sets():
    book = build_codebook([_cwe119()])
    codes = {g.code_word for g in book.groups}
    stream = normalize("the stack buffer overflow and buffer overrun overflow bugs")
    out = apply_synonym_coding(stream, book)
    assert len(out) <= len(stream)
    assert set(out) <= codes | set(stream)


@settings(max_examples=200, deadline=None)
@given(
    st.lists(
        st.sampled_from(["buffer", "overflow", "overrun", "stack", "heap", "code", "remot", "inject"]),
        max_size=12,
    )
)
def test_coding_idempotent(tokens):
    book = build_codebook(
        [
            _cwe119(),
            CweEntry(id=121, name="s", alternative_terms=["stack smash", "stack overflow"]),
        ],
        glossary=[["remote code", "remote execution"]],
    )
    once = book.apply(tokens)
    assert book.apply(once) == once


@settings(max_examples=100, deadline=None)
@given(st.text(max_size=80))
def test_normalize_tokens_are_clean(text):
    for token in normalize(text):
        assert token
        assert " " not in token
        assert token == token.lower()


def test_codebook_export_round_trip():
    book = build_codebook([_cwe119()], glossary=[["remote attacker", "remote user"]])
    text = book.export_text()
    loaded = SynonymCodebook.from_export_text(text)
    assert {g.code_word for g in loaded.groups} == {g.code_word for g in book.groups}
    assert loaded.apply(normalize("buffer overrun here")) == book.apply(normalize("buffer overrun here"))
