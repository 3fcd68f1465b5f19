"""Command line entry point: ``sentnet <command> ...``.

Exit codes: 0 success, 2 bad configuration or arguments, 3 bad input data,
4 a stage failed for another reason.
"""
import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from sentnet import __version__
from sentnet.classify import (ClassifierError, ForestConfig, SvmConfig, evaluate, load_model,
                              save_model, train_linear_svm, train_random_forest)
from sentnet.classmap import (ambiguity_report, build_class_map, parse_grid, split_merge_scores,
                              sweep_and_select)
from sentnet.corpus import (Corpus, CorpusError, load_answer_key, load_corpus, save_answer_key,
                            save_corpus, split_train_test)
from sentnet.louvain import LouvainConfig, load_partition, louvain_detect, modularity, save_partition
from sentnet.pipeline import PipelineConfig, ConfigError, StageError, load_config, run_pipeline
from sentnet.simgraph import build_graph, export_graph, graph_stats, import_graph
from sentnet.synth import corrupt_labels, generate_synthetic_corpus, synthetic_answer_key
from sentnet.textprep import PreprocessConfig, preprocess_corpus
from sentnet.vectorizer import (fit_transform, load_vectors, load_vocabulary, pairwise_similarities,
                                save_vectors, save_vocabulary)

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_STAGE = 0, 2, 3, 4

log = logging.getLogger("sentnet")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _emit(obj):
    print(json.dumps(obj, indent=2, sort_keys=True))


def _read_terms(path):
    docs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                docs.append(json.loads(line)["terms"])
    return docs


def _read_label_column(path, column):
    """Labels from a CSV that has a ``sentence`` column and ``column``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or column not in reader.fieldnames:
            raise CorpusError(f"{path}: no {column!r} column")
        return [row[column] for row in reader]


def _split_ids(n, ratio, seed, part):
    """Ids of the train or test part of a seeded split of ``n`` sentences."""
    dummy = Corpus.from_texts([str(i) for i in range(n)])
    train, test = split_train_test(dummy, ratio, seed=seed)
    return (train if part == "train" else test).ids


# ------------------------------------------------------------ commands

def cmd_preprocess(args):
    corpus = load_corpus(args.corpus, labeled=None)
    cfg = PreprocessConfig.default(args.stopwords, args.lexicon, enable_synonyms=not args.no_synonyms,
                                   enable_bigrams=not args.no_bigrams)
    with open(args.out, "w", encoding="utf-8") as fh:
        for s, terms in zip(corpus, preprocess_corpus(corpus.texts, cfg)):
            fh.write(json.dumps({"id": s.id, "terms": dict(sorted(terms.items()))}, ensure_ascii=False) + "\n")
    print(f"wrote {len(corpus)} term multisets to {args.out}")


def cmd_vectorize(args):
    vocab, vectors = fit_transform(_read_terms(args.terms))
    save_vectors(vectors, args.vectors)
    save_vocabulary(vocab, args.vocab)
    print(f"{len(vectors)} vectors over {len(vocab)} terms")


def cmd_graph(args):
    pairs = pairwise_similarities(load_vectors(args.vectors), backend=args.backend)
    g = build_graph(pairs, args.threshold)
    export_graph(g, args.out, args.format)
    _emit(vars(graph_stats(g)))


def cmd_detect(args):
    g = import_graph(args.graph)
    trace = []
    p = louvain_detect(g, LouvainConfig(seed=args.seed), trace=trace, backend=args.backend)
    save_partition(p, args.out)
    _emit({"n_communities": p.k, "n_singletons": p.n_singletons, "modularity": modularity(g, p),
           "sweeps": len(trace) - 1})


def cmd_sweep(args):
    corpus = load_corpus(args.corpus, labeled=True)
    pairs = pairwise_similarities(load_vectors(args.vectors), backend=args.backend)
    res = sweep_and_select(pairs, corpus, parse_grid(args.thresholds), LouvainConfig(seed=args.seed),
                           backend=args.backend)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    res.to_csv(out / "sweep.csv")
    res.to_curves_tsv(out / "curves.tsv")
    (out / "threshold.json").write_text(json.dumps(res.summary(), indent=2, sort_keys=True) + "\n",
                                        encoding="utf-8")
    _emit(res.summary())


def cmd_label(args):
    corpus = load_corpus(args.corpus, labeled=None)
    p = load_partition(args.partition)
    if p.n_nodes != len(corpus):
        raise CorpusError(f"partition has {p.n_nodes} nodes but the corpus has {len(corpus)} sentences")
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sentence", "community_id"])
        for s in corpus:
            w.writerow([s.text, int(p.membership[s.id])])
    print(f"labeled {len(corpus)} sentences with {p.k} communities")


def cmd_train(args):
    vectors = load_vectors(args.vectors)
    labels = _read_label_column(args.labels, args.label_column)
    if len(labels) != len(vectors):
        raise CorpusError("labels and vectors differ in length")
    ids = range(len(vectors))
    if args.train_ratio is not None:
        ids = _split_ids(len(vectors), args.train_ratio, args.split_seed, "train")
    vocab = load_vocabulary(args.vocab) if args.vocab else None
    n_features = len(vocab) if vocab else None
    X, y = [vectors[i] for i in ids], [labels[i] for i in ids]
    if args.model == "svm":
        model = train_linear_svm(X, y, SvmConfig(args.svm_lambda, args.svm_epochs, args.seed), n_features)
    else:
        model = train_random_forest(X, y, ForestConfig(args.trees, args.max_depth, args.seed), n_features)
    save_model(model, args.out, vocab)
    print(f"trained {model.kind} on {len(X)} sentences, {len(model.classes)} labels")


def cmd_evaluate(args):
    model, _ = load_model(args.model)
    vectors = load_vectors(args.vectors)
    truth = _read_label_column(args.labels, args.label_column)
    if len(truth) != len(vectors):
        raise CorpusError("labels and vectors differ in length")
    ids = range(len(vectors))
    if args.train_ratio is not None:
        ids = _split_ids(len(vectors), args.train_ratio, args.split_seed, "test")
    key = load_answer_key(args.answer_key) if args.answer_key else None
    mapping = None
    if args.class_map:
        doc = json.loads(Path(args.class_map).read_text(encoding="utf-8"))
        mapping = {}
        for c, row in zip(doc["communities"], doc["counts"]):
            best = max(range(len(row)), key=lambda b: (row[b], -b))
            mapping[str(c)] = doc["classes"][best]
        if key is None:
            key = {k: k for k in doc["classes"]}
    res = evaluate(model, [vectors[i] for i in ids], [truth[i] for i in ids], key, mapping)
    _emit({"model": model.kind, "accuracy": res.accuracy, "n_correct": res.n_correct,
           "n_total": res.n_total})


def cmd_report(args):
    corpus = load_corpus(args.corpus, labeled=True)
    p = load_partition(args.partition)
    cmap = build_class_map(p, corpus)
    sc = split_merge_scores(cmap)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = cmap.to_dict()
    doc.update({"split_score": sc.split_score, "merge_score": sc.merge_score})
    (out / "class_map.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    rep = ambiguity_report(cmap, corpus, p)
    rep.to_json(out / "ambiguity.json")
    _emit({"split_score": sc.split_score, "merge_score": sc.merge_score, "mixed_communities": len(rep)})


def cmd_synth(args):
    corpus = generate_synthetic_corpus(args.topics, args.per_topic, args.vocab, args.overlap, args.seed,
                                       zipf=args.zipf)
    if args.truth_out:
        save_corpus(corpus, args.truth_out)
    if args.answer_key_out:
        save_answer_key(synthetic_answer_key(corpus), args.answer_key_out)
    if args.corrupt:
        corpus = corrupt_labels(corpus, args.corrupt, seed=args.seed)
    save_corpus(corpus, args.out)
    print(f"wrote {len(corpus)} sentences in {len(corpus.classes)} topics to {args.out}")


_RUN_KEYS = [f.name for f in PipelineConfig.__dataclass_fields__.values()]


def cmd_run(args):
    overrides = {k: getattr(args, k) for k in _RUN_KEYS if getattr(args, k, None) is not None}
    cfg = load_config(args.config, overrides)
    res = run_pipeline(cfg)
    for n in res.notices:
        print(f"notice: {n}", file=sys.stderr)
    summary = {"output_dir": str(res.output_dir), "optimal_threshold": res.optimal_threshold,
               "method": res.method, "n_communities": res.n_communities, "files": res.files}
    if res.evaluation:
        summary["evaluation"] = res.evaluation
    _emit(summary)


# -------------------------------------------------------------- parser

def build_parser():
    ap = _Parser(prog="sentnet", description="Label sentences by community detection on similarity graphs.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log stage progress")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def backend_arg(p):
        p.add_argument("--backend", choices=["python", "cython"], default=None,
                       help="kernel implementation (default: compiled when available)")

    p = sub.add_parser("preprocess", help="tokenize, stem and expand a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--stopwords")
    p.add_argument("--lexicon")
    p.add_argument("--no-synonyms", action="store_true")
    p.add_argument("--no-bigrams", action="store_true")
    p.add_argument("--out", required=True, help="JSONL of term counts")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("vectorize", help="TF-IDF vectors from preprocessed terms")
    p.add_argument("--terms", required=True)
    p.add_argument("--vectors", required=True, help="output JSONL")
    p.add_argument("--vocab", required=True, help="output vocabulary JSON")
    p.set_defaults(func=cmd_vectorize)

    p = sub.add_parser("graph", help="thresholded similarity graph")
    p.add_argument("--vectors", required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--format", choices=["graphml", "edge-list"], default="graphml")
    p.add_argument("--out", required=True)
    backend_arg(p)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("detect", help="Louvain communities of a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="partition CSV")
    backend_arg(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("sweep", help="score a threshold grid and pick the optimum")
    p.add_argument("--corpus", required=True)
    p.add_argument("--vectors", required=True)
    p.add_argument("--thresholds", default="0:0.9:0.1", help="start:stop:step or a comma list")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    backend_arg(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("label", help="write sentence,community_id from a partition")
    p.add_argument("--corpus", required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_label)

    def split_args(p):
        p.add_argument("--train-ratio", type=float, default=None,
                       help="use only one part of a seeded split (train for 'train', test for 'evaluate')")
        p.add_argument("--split-seed", type=int, default=0)

    p = sub.add_parser("train", help="train a classifier")
    p.add_argument("--vectors", required=True)
    p.add_argument("--labels", required=True, help="CSV with a sentence column and a label column")
    p.add_argument("--label-column", default="class")
    p.add_argument("--vocab")
    p.add_argument("--model", choices=["svm", "forest"], default="svm")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--svm-lambda", type=float, default=None)
    p.add_argument("--svm-epochs", type=int, default=50)
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--max-depth", type=int, default=None)
    split_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="hit ratio of a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--vectors", required=True)
    p.add_argument("--labels", required=True, help="CSV holding the reference classes")
    p.add_argument("--label-column", default="class")
    p.add_argument("--answer-key")
    p.add_argument("--class-map", help="class_map.json; maps predicted communities to classes")
    split_args(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="class map and ambiguity report for a partition")
    p.add_argument("--corpus", required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("synth", help="generate a synthetic topic corpus")
    p.add_argument("--topics", type=int, default=5)
    p.add_argument("--per-topic", type=int, default=100)
    p.add_argument("--vocab", type=int, default=20, help="words per topic")
    p.add_argument("--overlap", type=float, default=0.1)
    p.add_argument("--zipf", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--corrupt", type=float, default=0.0, help="fraction of labels to reassign")
    p.add_argument("--truth-out", help="also write the uncorrupted corpus here")
    p.add_argument("--answer-key-out")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run", help="full pipeline from a config file and flags")
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--corpus")
    p.add_argument("--output-dir", dest="output_dir")
    p.add_argument("--stopwords")
    p.add_argument("--lexicon")
    p.add_argument("--answer-key", dest="answer_key")
    p.add_argument("--truth")
    p.add_argument("--thresholds")
    p.add_argument("--louvain-seed", dest="louvain_seed", type=int)
    p.add_argument("--split-seed", dest="split_seed", type=int)
    p.add_argument("--model-seed", dest="model_seed", type=int)
    p.add_argument("--train-ratio", dest="train_ratio", type=float)
    p.add_argument("--stratified", action="store_const", const=True, default=None)
    p.add_argument("--svm-lambda", dest="svm_lambda", type=float)
    p.add_argument("--svm-epochs", dest="svm_epochs", type=int)
    p.add_argument("--forest-trees", dest="forest_trees", type=int)
    p.add_argument("--forest-max-depth", dest="forest_max_depth", type=int)
    p.add_argument("--unlabeled-threshold", dest="unlabeled_threshold", type=float)
    backend_arg(p)
    p.set_defaults(func=cmd_run)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA if exc.is_data_error else EXIT_STAGE
    except (CorpusError, FileNotFoundError, ClassifierError, json.JSONDecodeError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
