"""Annotated corpora: data model, CoNLL column I/O and OntoNotes* cleanup.

A CoNLL file has one token per line, whitespace-separated columns::

    surface pos [lemma] [chunk ...] tag

Blank lines separate sentences and a line whose first column is
``-DOCSTART-`` starts a new document.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .errors import ConllParseError, UsageError

SPLITS = ("train", "dev", "test", "unlabeled")
DOCSTART = "-DOCSTART-"

DEFAULT_REMOVED_TYPES = frozenset(
    {"CARDINAL", "DATE", "MONEY", "ORDINAL", "PERCENT", "QUANTITY", "TIME"}
)


@dataclass(frozen=True)
class Token:
    surface: str
    pos: str
    lemma: str | None = None
    index: int = 0

    def __post_init__(self):
        if not self.surface or any(c.isspace() for c in self.surface):
            raise UsageError(f"invalid token surface {self.surface!r}")
        if not self.pos:
            raise UsageError(f"empty POS for token {self.surface!r}")

    @property
    def lemma_or_lower(self) -> str:
        return self.lemma if self.lemma is not None else self.surface.lower()


@dataclass(frozen=True, order=True)
class EntitySpan:
    """Half-open token interval ``[start, end)`` with a category label."""

    start: int
    end: int
    etype: str

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise UsageError(f"invalid span [{self.start}, {self.end})")


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    entities: tuple[EntitySpan, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        ents = tuple(sorted(self.entities))
        object.__setattr__(self, "entities", ents)
        n = len(self.tokens)
        prev_end = 0
        for span in ents:
            if span.end > n:
                raise UsageError(f"span {span} exceeds sentence length {n}")
            if span.start < prev_end:
                raise UsageError(f"overlapping spans in sentence: {ents}")
            prev_end = span.end

    def __len__(self):
        return len(self.tokens)

    @property
    def words(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def entity_mask(self) -> list[bool]:
        mask = [False] * len(self.tokens)
        for span in self.entities:
            for i in range(span.start, span.end):
                mask[i] = True
        return mask

    def covering_types(self) -> list[str | None]:
        """Entity type covering each token, or None outside spans."""
        out: list[str | None] = [None] * len(self.tokens)
        for span in self.entities:
            for i in range(span.start, span.end):
                out[i] = span.etype
        return out

    def with_entities(self, entities: Iterable[EntitySpan]) -> "Sentence":
        return replace(self, entities=tuple(entities))

    @classmethod
    def from_words(cls, words, pos=None, entities=(), lemmas=None):
        pos = pos or ["NN"] * len(words)
        lemmas = lemmas or [None] * len(words)
        toks = tuple(
            Token(w, p, lm, i) for i, (w, p, lm) in enumerate(zip(words, pos, lemmas))
        )
        return cls(toks, tuple(entities))


@dataclass(frozen=True)
class Corpus:
    documents: tuple[tuple[Sentence, ...], ...] = ()
    split: str = "train"

    def __post_init__(self):
        if self.split not in SPLITS:
            raise UsageError(f"unknown split {self.split!r}")
        docs = tuple(tuple(d) for d in self.documents)
        object.__setattr__(self, "documents", docs)
        if self.split == "unlabeled":
            for doc in docs:
                for s in doc:
                    if s.entities:
                        raise UsageError("unlabeled corpus carries entity spans")

    @property
    def sentences(self) -> list[Sentence]:
        return [s for doc in self.documents for s in doc]

    @property
    def labeled(self) -> bool:
        return self.split != "unlabeled"

    def num_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)

    def num_entities(self) -> int:
        return sum(len(s.entities) for s in self.sentences)

    def map_sentences(self, fn) -> "Corpus":
        return replace(self, documents=tuple(tuple(fn(s) for s in d) for d in self.documents))

    @classmethod
    def from_sentences(cls, sentences: Sequence[Sentence], split="train") -> "Corpus":
        sentences = tuple(sentences)
        return cls((sentences,) if sentences else (), split)


def concat(corpora: Sequence[Corpus], split="train") -> Corpus:
    docs: list[tuple[Sentence, ...]] = []
    for c in corpora:
        docs.extend(c.documents)
    return Corpus(tuple(docs), split)


# -- tag encodings -----------------------------------------------------------


def _split_tag(tag: str) -> tuple[str, str | None]:
    if tag == "O":
        return "O", None
    if len(tag) > 2 and tag[1] == "-" and tag[0] in "BI":
        return tag[0], tag[2:]
    raise ValueError(f"unrecognized tag {tag!r}")


def tags_to_spans(tags: Sequence[str], bio_variant: str = "IOB1") -> list[EntitySpan]:
    """Decode IOB1 or BIO tags into spans.

    Under IOB1 an ``I-X`` that does not continue an ``X`` span opens one;
    under BIO the same situation is an error.
    """
    if bio_variant not in ("IOB1", "BIO"):
        raise UsageError(f"unknown bio variant {bio_variant!r}")
    spans = []
    start, etype = None, None
    for i, tag in enumerate(tags):
        prefix, t = _split_tag(tag)
        if prefix == "O":
            if start is not None:
                spans.append(EntitySpan(start, i, etype))
            start, etype = None, None
        elif prefix == "B" or t != etype:
            if prefix == "I" and bio_variant == "BIO":
                raise ValueError(f"I-{t} at position {i} does not continue a {t} span")
            if start is not None:
                spans.append(EntitySpan(start, i, etype))
            start, etype = i, t
    if start is not None:
        spans.append(EntitySpan(start, len(tags), etype))
    return spans


def spans_to_bio(spans: Iterable[EntitySpan], length: int) -> list[str]:
    tags = ["O"] * length
    for span in spans:
        tags[span.start] = f"B-{span.etype}"
        for i in range(span.start + 1, span.end):
            tags[i] = f"I-{span.etype}"
    return tags


# -- reading / writing -------------------------------------------------------


def _check_spans(spans, path, line):
    prev_end = 0
    for s in sorted(spans):
        if s.start < prev_end:
            raise ConllParseError("overlapping entity spans", path, line)
        prev_end = s.end


def read_conll(
    lines: Iterable[str],
    bio_variant: str = "IOB1",
    has_lemma_column: bool = False,
    labeled: bool = True,
    split: str | None = None,
    source=None,
) -> Corpus:
    """Parse CoNLL column lines into a Corpus."""
    if split is None:
        split = "train" if labeled else "unlabeled"
    if not labeled:
        split = "unlabeled"
    min_cols = 2 + int(has_lemma_column) + int(labeled)

    documents: list[tuple[Sentence, ...]] = []
    current_doc: list[Sentence] = []
    doc_open = False
    rows: list[tuple[int, list[str]]] = []

    def flush_sentence():
        if not rows:
            return
        tokens = []
        for i, (_, cols) in enumerate(rows):
            lemma = cols[2] if has_lemma_column else None
            tokens.append(Token(cols[0], cols[1], lemma, i))
        spans = ()
        if labeled:
            first_line = rows[0][0]
            try:
                spans = tags_to_spans([cols[-1] for _, cols in rows], bio_variant)
            except ValueError as exc:
                raise ConllParseError(str(exc), source, first_line) from None
            _check_spans(spans, source, first_line)
        current_doc.append(Sentence(tuple(tokens), tuple(spans)))
        rows.clear()

    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        cols = line.split()
        if not cols:
            flush_sentence()
            continue
        if cols[0] == DOCSTART:
            flush_sentence()
            if doc_open or current_doc:
                documents.append(tuple(current_doc))
            current_doc = []
            doc_open = True
            continue
        if len(cols) < min_cols:
            raise ConllParseError(
                f"expected at least {min_cols} columns, got {len(cols)}", source, lineno
            )
        rows.append((lineno, cols))
    flush_sentence()
    if doc_open or current_doc:
        documents.append(tuple(current_doc))
    return Corpus(tuple(documents), split)


def load_conll(
    path,
    bio_variant: str = "IOB1",
    has_lemma_column: bool = False,
    labeled: bool = True,
    split: str | None = None,
) -> Corpus:
    with open(path, encoding="utf-8", newline="") as f:
        return read_conll(f, bio_variant, has_lemma_column, labeled, split, source=str(path))


def format_conll(corpus: Corpus, with_lemma: bool | None = None) -> str:
    """Serialize as BIO-encoded CoNLL text. Lemmas are written when any token has one."""
    if with_lemma is None:
        with_lemma = any(t.lemma is not None for s in corpus.sentences for t in s.tokens)
    buf = io.StringIO()
    for doc in corpus.documents:
        buf.write(f"{DOCSTART} -X- O\n\n")
        for sent in doc:
            tags = spans_to_bio(sent.entities, len(sent))
            for tok, tag in zip(sent.tokens, tags):
                cols = [tok.surface, tok.pos]
                if with_lemma:
                    cols.append(tok.lemma_or_lower)
                if corpus.labeled:
                    cols.append(tag)
                buf.write(" ".join(cols) + "\n")
            buf.write("\n")
    return buf.getvalue()


def atomic_write_text(path, text: str) -> None:
    path = os.fspath(path)
    tmp = f"{path}.tmp{os.getpid()}"
    try:
        with open(tmp, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def write_conll(corpus: Corpus, path, scheme: str = "BIO", with_lemma: bool | None = None) -> None:
    if scheme != "BIO":
        raise UsageError("only BIO output is supported")
    atomic_write_text(path, format_conll(corpus, with_lemma))


# -- OntoNotes* --------------------------------------------------------------


def _normalize_spans(sent: Sentence, removed_types) -> Sentence:
    kept = []
    for span in sent.entities:
        if span.etype in removed_types:
            continue
        start, end = span.start, span.end
        # repeated so that a second pass is a no-op
        while start < end and sent.tokens[start].surface.lower() == "the":
            start += 1
        while end > start and sent.tokens[end - 1].surface.lower() == "'s":
            end -= 1
        if end > start:
            kept.append(EntitySpan(start, end, span.etype))
    return sent.with_entities(kept)


def normalize_ontonotes(corpus: Corpus, removed_types=DEFAULT_REMOVED_TYPES) -> Corpus:
    """Drop numeric entity types and move a leading "the" and a trailing "'s" outside spans."""
    if not corpus.labeled:
        raise UsageError("normalize_ontonotes needs a labeled corpus")
    removed = frozenset(removed_types)
    return corpus.map_sentences(lambda s: _normalize_spans(s, removed))
