"""Domain-adaptation toolkit for unsupervised MT data pipelines.

Classifies monolingual-data scenarios, plans which adaptation method
applies, builds batch-weighted training streams, selects pseudo in-domain
data by cross-entropy difference over n-gram language models, and
assembles fine-tuning corpora.  BPE preprocessing and BLEU evaluation are
included as supporting harness.
"""

from adaptmt.corpus import (
    BpeModel,
    Corpus,
    DomainTag,
    LanguageId,
    Sentence,
    bpe_apply,
    bpe_train,
    desegment,
    load_corpus,
    save_corpus,
)
from adaptmt.ngram_lm import NGramLM, cross_entropy, train_lm
from adaptmt.selection import (
    ScoredSentence,
    ced_score,
    select_lowest_k,
    size_matched_subsample,
)
from adaptmt.scheduler import Batch, BatchWeightingSchedule, build_stream, r_out
from adaptmt.backtranslate import BilingualLexicon, TranslatorKind, TranslatorSpec, back_translate
from adaptmt.planner import (
    AdaptationPlan,
    CorpusManifest,
    Method,
    Scenario,
    ScenarioLabel,
    assemble_finetune_corpora,
    classify_scenario,
    plan_methods,
)
from adaptmt.evaluate import BleuReport, CurveLogger, corpus_bleu, log_curve

__version__ = "0.1.0"

__all__ = [
    "AdaptationPlan",
    "Batch",
    "BatchWeightingSchedule",
    "BilingualLexicon",
    "BleuReport",
    "BpeModel",
    "Corpus",
    "CorpusManifest",
    "CurveLogger",
    "DomainTag",
    "LanguageId",
    "Method",
    "NGramLM",
    "Scenario",
    "ScenarioLabel",
    "ScoredSentence",
    "Sentence",
    "TranslatorKind",
    "TranslatorSpec",
    "assemble_finetune_corpora",
    "back_translate",
    "bpe_apply",
    "bpe_train",
    "build_stream",
    "ced_score",
    "classify_scenario",
    "corpus_bleu",
    "cross_entropy",
    "desegment",
    "load_corpus",
    "log_curve",
    "plan_methods",
    "r_out",
    "save_corpus",
    "select_lowest_k",
    "size_matched_subsample",
    "train_lm",
]
