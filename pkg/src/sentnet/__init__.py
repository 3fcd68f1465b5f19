"""Automatic sentence labeling with similarity graphs and Louvain communities.

Typical flow::

    from sentnet import (PreprocessConfig, preprocess_corpus, fit_transform,
                         pairwise_similarities, sweep_and_select)

    docs = preprocess_corpus(corpus.texts, PreprocessConfig.default())
    vocab, vectors = fit_transform(docs)
    result = sweep_and_select(pairwise_similarities(vectors), corpus, parse_grid("0:0.9:0.1"))
"""
__version__ = "0.1.0"

from sentnet._backend import available as available_backends
from sentnet.classify import (EvalResult, ForestConfig, LinearSvmModel, RandomForestModel, SvmConfig,
                              evaluate, load_model, predict, save_model, train_linear_svm,
                              train_random_forest)
from sentnet.classmap import (AmbiguityReport, ClassMap, SplitMergeScores, SweepResult,
                              ambiguity_report, build_class_map, parse_grid, select_threshold,
                              split_merge_scores, sweep_and_select)
from sentnet.corpus import (Corpus, CorpusError, Sentence,
                            load_answer_key, load_corpus, save_corpus, split_train_test)
from sentnet.louvain import (LouvainConfig, Partition, brute_force_partition, louvain_detect,
                             modularity)
from sentnet.simgraph import GraphStats, SentenceGraph, build_graph, export_graph, graph_stats, import_graph
from sentnet.synth import generate_synthetic_corpus
from sentnet.textprep import (PreprocessConfig, SynonymLexicon, expand_terms, preprocess_corpus,
                              preprocess_sentence, stem_tokens, tokenize_clean)
from sentnet.vectorizer import (SparseVector, Vocabulary, cosine_similarity, fit_transform,
                                fit_vocabulary, pairwise_similarities, transform_tfidf)
