"""Sentence preprocessing: cleaning, stemming, synonym and bigram expansion.

A preprocessed sentence is a ``collections.Counter`` mapping terms to their
counts. Terms are stems, stems of synonyms, and space-joined bigrams.
"""
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from sentnet.porter import stem

_WORD = re.compile(r"[^\W_]+")


class SynonymLexicon:
    """Stemmed term -> stemmed synonyms. Lookups of unknown terms return []."""

    def __init__(self, mapping=None):
        self._map = {}
        for term, syns in (mapping or {}).items():
            self.add(term, syns)

    def add(self, term, synonyms):
        key = _stem_phrase(term)
        out = self._map.setdefault(key, [])
        for syn in synonyms:
            s = _stem_phrase(syn)
            if s and s != key and s not in out:
                out.append(s)
        if not out:
            del self._map[key]

    def __getitem__(self, term):
        return self._map.get(term, [])

    def __contains__(self, term):
        return term in self._map

    def __len__(self):
        return len(self._map)

    def items(self):
        return self._map.items()

    def __eq__(self, other):
        return isinstance(other, SynonymLexicon) and self._map == other._map


def _stem_phrase(text):
    return " ".join(stem(w) for w in _WORD.findall(text.lower()))


def load_stopwords(path=None) -> frozenset:
    """One token per line, ``#`` starts a comment. Default: bundled English list."""
    if path is None:
        text = resources.files("sentnet.data").joinpath("stopwords_en.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    words = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip().lower()
        if line:
            words.add(line)
    return frozenset(words)


def load_lexicon(path=None) -> SynonymLexicon:
    """TSV of ``term<TAB>syn1,syn2,...``. Default: the small bundled lexicon."""
    if path is None:
        text = resources.files("sentnet.data").joinpath("synonyms_en.tsv").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    lex = SynonymLexicon()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "\t" not in line:
            raise ValueError(f"lexicon line {lineno}: expected term<TAB>synonyms")
        term, syns = line.split("\t", 1)
        lex.add(term.strip(), [s.strip() for s in syns.split(",") if s.strip()])
    return lex


@dataclass(frozen=True)
class PreprocessConfig:
    stopwords: frozenset = frozenset()
    lexicon: SynonymLexicon = field(default_factory=SynonymLexicon)
    enable_synonyms: bool = True
    enable_bigrams: bool = True

    def __post_init__(self):
        object.__setattr__(self, "stopwords", frozenset(w.lower() for w in self.stopwords))

    @classmethod
    def default(cls, stopwords_path=None, lexicon_path=None, **kw):
        return cls(load_stopwords(stopwords_path), load_lexicon(lexicon_path), **kw)


def tokenize_clean(raw_text: str, stopwords=frozenset()) -> list:
    """Lowercase, split on non-alphanumerics and drop stopwords."""
    return [t for t in _WORD.findall(raw_text.lower()) if t not in stopwords]


def stem_tokens(tokens) -> list:
    return [stem(t) for t in tokens]


def expand_terms(tokens, config: PreprocessConfig) -> Counter:
    """Add synonyms and bigrams to a stemmed token sequence.

    Bigrams are the adjacent pairs of the original sequence, plus each pair
    with one position (never both) replaced by one of its synonyms.
    """
    terms = Counter(tokens)
    syn = config.lexicon if config.enable_synonyms else SynonymLexicon()
    if config.enable_synonyms:
        for t in tokens:
            terms.update(syn[t])
    if config.enable_bigrams:
        for a, b in zip(tokens, tokens[1:]):
            terms[f"{a} {b}"] += 1
            for s in syn[a]:
                terms[f"{s} {b}"] += 1
            for s in syn[b]:
                terms[f"{a} {s}"] += 1
    return terms


def preprocess_sentence(raw_text: str, config: PreprocessConfig) -> Counter:
    return expand_terms(stem_tokens(tokenize_clean(raw_text, config.stopwords)), config)


def preprocess_corpus(texts, config: PreprocessConfig) -> list:
    return [preprocess_sentence(t, config) for t in texts]
