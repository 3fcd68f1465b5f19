"""Loading, saving and splitting sentence datasets."""
import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

import numpy as np


class CorpusError(ValueError):
    """Base class for problems with an input dataset."""


class MissingFileError(CorpusError, FileNotFoundError):
    pass


class EmptyCorpusError(CorpusError):
    pass


class MalformedRowError(CorpusError):
    pass


class DuplicateSentenceError(CorpusError):
    pass


@dataclass(frozen=True)
class Sentence:
    id: int
    text: str
    label: Optional[str] = None


@dataclass(frozen=True)
class Corpus:
    sentences: tuple

    def __post_init__(self):
        seen = {}
        ids = set()
        for s in self.sentences:
            if s.id in ids:
                raise CorpusError(f"duplicate sentence id {s.id}")
            ids.add(s.id)
            if not s.text.strip():
                raise MalformedRowError(f"sentence {s.id} is empty")
            if s.text in seen:
                raise DuplicateSentenceError(
                    f"sentence {s.id} duplicates sentence {seen[s.text]}: {s.text!r}")
            seen[s.text] = s.id

    @classmethod
    def from_texts(cls, texts: Iterable[str], labels: Optional[Iterable[str]] = None) -> "Corpus":
        texts = list(texts)
        labels = [None] * len(texts) if labels is None else list(labels)
        if len(labels) != len(texts):
            raise CorpusError("texts and labels differ in length")
        return cls(tuple(Sentence(i, t, lab) for i, (t, lab) in enumerate(zip(texts, labels))))

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    @property
    def ids(self):
        return [s.id for s in self.sentences]

    @property
    def texts(self):
        return [s.text for s in self.sentences]

    @property
    def labels(self):
        return [s.label for s in self.sentences]

    @property
    def labeled(self) -> bool:
        return bool(self.sentences) and all(s.label is not None for s in self.sentences)

    @property
    def classes(self):
        """Distinct labels, sorted."""
        return sorted({s.label for s in self.sentences if s.label is not None})

    def subset(self, ids) -> "Corpus":
        """Sentences with the given ids, in corpus order. Ids are kept."""
        wanted = set(ids)
        return Corpus(tuple(s for s in self.sentences if s.id in wanted))

    def with_labels(self, labels) -> "Corpus":
        """Copy with labels replaced; ``labels`` is a sequence aligned with the sentences
        or a mapping from sentence id."""
        if isinstance(labels, dict):
            return Corpus(tuple(Sentence(s.id, s.text, labels[s.id]) for s in self.sentences))
        labels = list(labels)
        if len(labels) != len(self.sentences):
            raise CorpusError("label count does not match corpus size")
        return Corpus(tuple(Sentence(s.id, s.text, lab) for s, lab in zip(self.sentences, labels)))

    def unlabeled(self) -> "Corpus":
        return Corpus(tuple(Sentence(s.id, s.text, None) for s in self.sentences))


def _infer_format(path: Path, fmt):
    if fmt:
        fmt = fmt.lower()
        if fmt not in ("csv", "jsonl"):
            raise CorpusError(f"unknown corpus format {fmt!r}")
        return fmt
    return "jsonl" if path.suffix.lower() in (".jsonl", ".ndjson") else "csv"


def _read_csv(path, labeled):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyCorpusError(f"empty corpus: {path}")
        header = [h.strip() for h in header]
        if "sentence" not in header:
            raise MalformedRowError(f"{path}: header must contain a 'sentence' column")
        if labeled and "class" not in header:
            raise MalformedRowError(f"{path}: labeled corpus needs a 'class' column")
        if labeled is None:
            labeled = "class" in header
        si = header.index("sentence")
        ci = header.index("class") if "class" in header else None
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise MalformedRowError(
                    f"{path}:{lineno}: expected {len(header)} columns, got {len(row)}")
            rows.append((lineno, row[si], row[ci] if ci is not None and labeled else None))
    return rows, labeled


def _read_jsonl(path, labeled):
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRowError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict) or not isinstance(obj.get("sentence"), str):
                raise MalformedRowError(f"{path}:{lineno}: object needs a string 'sentence'")
            label = obj.get("class")
            if labeled and not isinstance(label, str):
                raise MalformedRowError(f"{path}:{lineno}: missing 'class'")
            rows.append((lineno, obj["sentence"], label if isinstance(label, str) else None))
    if labeled is None:
        labeled = bool(rows) and all(r[2] is not None for r in rows)
    return rows, labeled


def load_corpus(path, format=None, labeled=True) -> Corpus:
    """Read a CSV (``sentence[,class]``) or JSONL corpus.

    Ids are assigned densely in file order. Duplicate sentence texts are an
    error rather than being silently dropped. ``labeled=None`` reads labels
    when the file has them.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"no such corpus file: {path}")
    fmt = _infer_format(path, format)
    rows, labeled = _read_csv(path, labeled) if fmt == "csv" else _read_jsonl(path, labeled)
    if not rows:
        raise EmptyCorpusError(f"empty corpus: {path}")

    sentences = []
    seen = {}
    for lineno, text, label in rows:
        if not text.strip():
            raise MalformedRowError(f"{path}:{lineno}: empty sentence")
        if labeled and (label is None or not label.strip()):
            raise MalformedRowError(f"{path}:{lineno}: empty class")
        if text in seen:
            raise DuplicateSentenceError(
                f"{path}:{lineno}: duplicate sentence (first seen at line {seen[text]}): {text!r}")
        seen[text] = lineno
        sentences.append(Sentence(len(sentences), text, label if labeled else None))
    return Corpus(tuple(sentences))


def save_corpus(corpus: Corpus, path, format=None):
    path = Path(path)
    fmt = _infer_format(path, format)
    labeled = corpus.labeled
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["sentence", "class"] if labeled else ["sentence"])
            for s in corpus:
                writer.writerow([s.text, s.label] if labeled else [s.text])
    else:
        with open(path, "w", encoding="utf-8") as fh:
            for s in corpus:
                obj = {"sentence": s.text}
                if labeled:
                    obj["class"] = s.label
                fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def load_answer_key(path) -> dict:
    """Read ``class,message_id`` rows into a dict."""
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"no such answer key: {path}")
    key = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"class", "message_id"} <= set(reader.fieldnames):
            raise MalformedRowError(f"{path}: header must be 'class,message_id'")
        for row in reader:
            if row["class"] in key:
                raise MalformedRowError(f"{path}: class {row['class']!r} listed twice")
            key[row["class"]] = row["message_id"]
    return key


def save_answer_key(key: dict, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["class", "message_id"])
        for cls in sorted(key):
            writer.writerow([cls, key[cls]])


def check_answer_key(key: dict, classes):
    missing = sorted(set(classes) - set(key))
    if missing:
        raise CorpusError(f"answer key has no message for classes: {missing}")


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def split_train_test(corpus: Corpus, train_ratio=0.8, seed=0, stratified=False):
    """Seeded train/test split. Sentence ids are preserved in both parts.

    The train size is ``round_half_up(n * train_ratio)``. With
    ``stratified=True`` each class gets ``floor(n_c * ratio)`` training
    sentences, and the remaining slots go to the classes with the largest
    fractional parts (ties by class name).
    """
    if not 0.0 < train_ratio < 1.0:
        raise ValueError("train_ratio must lie in (0, 1)")
    n = len(corpus)
    n_train = _round_half_up(n * train_ratio)
    if n_train == 0 or n_train == n:
        raise CorpusError(f"split of {n} sentences at ratio {train_ratio} leaves one side empty")
    rng = np.random.default_rng(seed)
    ids = np.asarray(corpus.ids)

    if not stratified:
        perm = rng.permutation(n)
        train_ids = ids[perm[:n_train]]
    else:
        if not corpus.labeled:
            raise CorpusError("stratified split needs a labeled corpus")
        by_class = {}
        for s in corpus:
            by_class.setdefault(s.label, []).append(s.id)
        small = sorted(c for c, members in by_class.items() if len(members) < 2)
        if small:
            raise CorpusError(f"classes with fewer than 2 sentences cannot be stratified: {small}")
        classes = sorted(by_class)
        exact = {c: len(by_class[c]) * train_ratio for c in classes}
        quota = {c: int(math.floor(exact[c])) for c in classes}
        extra = n_train - sum(quota.values())
        for c in sorted(classes, key=lambda c: (-(exact[c] - quota[c]), c))[:extra]:
            quota[c] += 1
        train_ids = []
        for c in classes:
            members = np.asarray(by_class[c])
            train_ids.extend(members[rng.permutation(len(members))[:quota[c]]].tolist())
        train_ids = np.asarray(train_ids)

    train_set = set(train_ids.tolist())
    train = corpus.subset(train_set)
    test = corpus.subset(i for i in corpus.ids if i not in train_set)
    return train, test
