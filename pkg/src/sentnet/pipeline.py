"""End-to-end labeling run: preprocess, vectorize, build graphs, detect
communities, pick the threshold, label, then train and test classifiers.

Every output is a pure function of the inputs and the config, so two runs
with the same config write byte-identical files.
"""
import csv
import json
import logging
import shutil
import tempfile
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

from sentnet.classify import (ForestConfig, SvmConfig, evaluate, train_linear_svm,
                              train_random_forest)
from sentnet.classmap import (ambiguity_report, build_class_map, parse_grid, split_merge_scores,
                              sweep_and_select)
from sentnet.corpus import (CorpusError, check_answer_key, load_answer_key, load_corpus,
                            split_train_test)
from sentnet.louvain import LouvainConfig, louvain_detect, save_partition
from sentnet.simgraph import build_graph, export_graph, graph_stats
from sentnet.textprep import PreprocessConfig, preprocess_corpus
from sentnet.vectorizer import fit_transform, pairwise_similarities

log = logging.getLogger(__name__)

# Threshold used to label a corpus that has no reference classes to sweep against.
UNLABELED_THRESHOLD = 0.5477


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    """A pipeline stage failed; ``cause`` holds the original exception."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause

    @property
    def is_data_error(self):
        return isinstance(self.cause, (CorpusError, FileNotFoundError))


@dataclass
class PipelineConfig:
    corpus: str = ""
    output_dir: str = "sentnet-out"
    corpus_format: Optional[str] = None
    stopwords: Optional[str] = None
    lexicon: Optional[str] = None
    answer_key: Optional[str] = None
    truth: Optional[str] = None  # corpus with reference labels for scoring, if they differ
    enable_synonyms: bool = True
    enable_bigrams: bool = True
    thresholds: str = "0:0.9:0.1"
    unlabeled_threshold: float = UNLABELED_THRESHOLD
    louvain_seed: int = 0
    split_seed: int = 0
    model_seed: int = 0
    train_ratio: float = 0.8
    stratified: bool = False
    svm_lambda: Optional[float] = None
    svm_epochs: int = 50
    forest_trees: int = 100
    forest_max_depth: Optional[int] = None
    export_graph: bool = True
    backend: Optional[str] = None

    def grid(self):
        return parse_grid(self.thresholds)

    def validate(self):
        if not self.corpus:
            raise ConfigError("no corpus given")
        if not self.output_dir:
            raise ConfigError("no output_dir given")
        try:
            grid = self.grid()
        except ValueError as exc:
            raise ConfigError(f"bad threshold grid {self.thresholds!r}: {exc}") from None
        if len(grid) < 2:
            raise ConfigError("threshold grid needs at least two points")
        if any(not 0.0 <= t < 1.0 for t in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("thresholds must be increasing and lie in [0, 1)")
        if not 0.0 < self.train_ratio < 1.0:
            raise ConfigError("train_ratio must lie in (0, 1)")
        if not 0.0 <= self.unlabeled_threshold < 1.0:
            raise ConfigError("unlabeled_threshold must lie in [0, 1)")
        if self.svm_lambda is not None and self.svm_lambda <= 0:
            raise ConfigError("svm_lambda must be positive")
        if self.svm_epochs < 1 or self.forest_trees < 1:
            raise ConfigError("svm_epochs and forest_trees must be positive")
        if self.backend not in (None, "python", "cython"):
            raise ConfigError(f"unknown backend {self.backend!r}")
        return self

    def to_text(self):
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            lines.append(f"{f.name} = {'' if v is None else _to_text(v)}")
        return "\n".join(lines) + "\n"


def _to_text(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _coerce(name, kind, raw):
    raw = raw.strip()
    optional = str(kind).startswith("typing.Optional") or "None" in str(kind)
    if raw == "" or raw.lower() == "none":
        if optional:
            return None
        if kind is str:
            return ""
        raise ConfigError(f"{name} needs a value")
    base = kind
    if optional:
        base = [a for a in kind.__args__ if a is not type(None)][0]
    try:
        if base is bool:
            if raw.lower() in _TRUE:
                return True
            if raw.lower() in _FALSE:
                return False
            raise ValueError(raw)
        return base(raw)
    except ValueError:
        raise ConfigError(f"{name}: cannot read {raw!r} as {base.__name__}") from None


def config_from_mapping(values: dict, base: PipelineConfig = None) -> PipelineConfig:
    """Apply ``values`` (strings or already-typed values) on top of ``base``."""
    cfg = asdict(base or PipelineConfig())
    types = {f.name: f.type for f in fields(PipelineConfig)}
    for k, v in values.items():
        if k not in types:
            raise ConfigError(f"unknown config key {k!r}")
        cfg[k] = _coerce(k, types[k], v) if isinstance(v, str) else v
    return PipelineConfig(**cfg)


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"no such config file: {path}")
    values = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (x.strip() for x in line.split("=", 1))
        values[key] = value
    return values


def load_config(path=None, overrides=None) -> PipelineConfig:
    values = read_config_file(path) if path else {}
    cfg = config_from_mapping(values)
    if overrides:
        cfg = config_from_mapping({k: v for k, v in overrides.items() if v is not None}, cfg)
    # relative input paths in a config file are resolved against its directory
    if path:
        root = Path(path).resolve().parent
        for key in ("corpus", "stopwords", "lexicon", "answer_key", "truth"):
            v = getattr(cfg, key)
            if v and key not in (overrides or {}) and not Path(v).is_absolute():
                setattr(cfg, key, str(root / v))
    return cfg.validate()


# ------------------------------------------------------------------ run

@dataclass
class RunResult:
    output_dir: Path
    files: list
    optimal_threshold: float
    method: str
    n_communities: int
    evaluation: Optional[list] = None
    notices: tuple = ()


def _dump_json(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


class _Stages:
    def __init__(self):
        self.current = None

    def __call__(self, name):
        self.current = name
        log.info("stage: %s", name)
        return self


def run_pipeline(config: PipelineConfig) -> RunResult:
    """Run every stage and write the reports into ``config.output_dir``.

    Files are written to a scratch directory next to the output directory
    and moved into place only when every stage has succeeded.
    """
    config.validate()
    out = Path(config.output_dir)
    out.parent.mkdir(parents=True, exist_ok=True)
    scratch = Path(tempfile.mkdtemp(prefix=".sentnet-", dir=out.parent))
    stage = _Stages()
    try:
        result = _run(config, scratch, stage)
    except Exception as exc:
        shutil.rmtree(scratch, ignore_errors=True)
        if isinstance(exc, (StageError, ConfigError)):
            raise
        raise StageError(stage.current or "setup", exc) from exc
    out.mkdir(parents=True, exist_ok=True)
    for name in result.files:
        shutil.move(str(scratch / name), str(out / name))
    shutil.rmtree(scratch, ignore_errors=True)
    result.output_dir = out
    return result


def _run(cfg: PipelineConfig, out: Path, stage) -> RunResult:
    files, notices = [], []

    stage("load")
    corpus = load_corpus(cfg.corpus, cfg.corpus_format, labeled=None)
    truth = corpus
    if cfg.truth:
        truth = load_corpus(cfg.truth, labeled=True)
        if truth.texts != corpus.texts:
            raise CorpusError("truth corpus does not list the same sentences in the same order")
    key = None
    if corpus.labeled:
        key = load_answer_key(cfg.answer_key) if cfg.answer_key else {c: c for c in truth.classes}
        check_answer_key(key, set(corpus.classes) | set(truth.classes))

    stage("preprocess")
    prep = PreprocessConfig.default(cfg.stopwords, cfg.lexicon, enable_synonyms=cfg.enable_synonyms,
                                    enable_bigrams=cfg.enable_bigrams)
    docs = preprocess_corpus(corpus.texts, prep)

    stage("vectorize")
    vocab, vectors = fit_transform(docs)
    pairs = pairwise_similarities(vectors, backend=cfg.backend)

    stage("sweep")
    lcfg = LouvainConfig(seed=cfg.louvain_seed)
    if corpus.labeled:
        sweep = sweep_and_select(pairs, corpus, cfg.grid(), lcfg, backend=cfg.backend)
        sweep.to_csv(out / "sweep.csv")
        sweep.to_curves_tsv(out / "curves.tsv")
        files += ["sweep.csv", "curves.tsv"]
        theta, method, degenerate = sweep.optimal_threshold, sweep.method, sweep.degenerate
    else:
        notices.append("corpus has no labels: threshold sweep skipped, "
                       f"labeling at the fixed threshold {cfg.unlabeled_threshold}")
        theta, method, degenerate = cfg.unlabeled_threshold, "fixed", False

    stage("label")
    g = build_graph(pairs, theta)
    p = louvain_detect(g, lcfg, backend=cfg.backend)
    stats = graph_stats(g)
    _dump_json({"optimal_threshold": theta, "method": method, "degenerate": degenerate,
                "n_communities": p.k, "n_singletons": p.n_singletons,
                "n_edges": stats.n_edges, "n_components": stats.n_components,
                "vocabulary_size": len(vocab), "vocabulary_hash": vocab.digest()},
               out / "threshold.json")
    save_partition(p, out / "partition.csv")
    with open(out / "labeled.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sentence", "community_id"])
        for s in corpus:
            w.writerow([s.text, int(p.membership[s.id])])
    files += ["threshold.json", "partition.csv", "labeled.csv"]
    if cfg.export_graph:
        export_graph(g, out / "graph.graphml")
        files.append("graph.graphml")

    evaluation = None
    if corpus.labeled:
        cmap = build_class_map(p, corpus)
        sc = split_merge_scores(cmap)
        doc = cmap.to_dict()
        doc.update({"split_score": sc.split_score, "merge_score": sc.merge_score,
                    "split_vector": list(sc.split_vector), "merge_vector": list(sc.merge_vector)})
        _dump_json(doc, out / "class_map.json")
        ambiguity_report(cmap, corpus, p).to_json(out / "ambiguity.json")
        files += ["class_map.json", "ambiguity.json"]

        stage("train")
        evaluation = _train_and_test(cfg, corpus, truth, key, vectors, len(vocab), p)
        _dump_json({"rows": evaluation, "threshold": theta, "train_ratio": cfg.train_ratio,
                    "split_seed": cfg.split_seed, "model_seed": cfg.model_seed},
                   out / "evaluation.json")
        files.append("evaluation.json")
    else:
        notices.append("corpus has no labels: class map, ambiguity report and evaluation skipped")

    (out / "config.txt").write_text(cfg.to_text(), encoding="utf-8")
    files.append("config.txt")
    for n in notices:
        log.info(n)
    return RunResult(out, files, theta, method, p.k, evaluation, tuple(notices))


def _train_and_test(cfg, corpus, truth, key, vectors, n_features, p):
    train, test = split_train_test(corpus, cfg.train_ratio, seed=cfg.split_seed,
                                   stratified=cfg.stratified)
    x_train = [vectors[i] for i in train.ids]
    x_test = [vectors[i] for i in test.ids]
    y_test = [truth.sentences[i].label for i in test.ids]
    community = [f"COMMUNITY_{int(p.membership[i])}" for i in train.ids]
    to_class = {f"COMMUNITY_{c}": k for c, k in build_class_map(p, train).majority_class().items()}

    trainers = [
        ("svm", lambda X, y: train_linear_svm(X, y, SvmConfig(cfg.svm_lambda, cfg.svm_epochs, cfg.model_seed),
                                              n_features=n_features)),
        ("random_forest", lambda X, y: train_random_forest(
            X, y, ForestConfig(cfg.forest_trees, cfg.forest_max_depth, cfg.model_seed), n_features=n_features)),
    ]
    rows = []
    for name, fit in trainers:
        for labeling, y_train, mapping in (("human", train.labels, None),
                                           ("community", community, to_class)):
            if len(set(y_train)) < 2:
                rows.append({"model": name, "labeling": labeling, "accuracy": None,
                             "note": "fewer than two training labels"})
                continue
            res = evaluate(fit(x_train, y_train), x_test, y_test, key, mapping)
            rows.append({"model": name, "labeling": labeling, "accuracy": res.accuracy,
                         "n_correct": res.n_correct, "n_total": res.n_total})
    return rows
