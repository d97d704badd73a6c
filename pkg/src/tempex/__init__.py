"""Self-supervised extraction of multi-attribute records from template-generated result pages."""

from .annotation import (
    Annotation,
    AnnotationSet,
    AttributeType,
    ConfigError,
    DomainSchema,
    Gazetteer,
    ThresholdSet,
    annotate,
    load_schema,
)
from .corpus import Corpus, CorpusSpec, generate_corpus
from .dom import DomTree, ParseError, build_tree, parse_html
from .evaluation import evaluate, evaluate_corpus
from .learning import learn_loop, learn_step
from .pipeline import ExtractionResult, StageError, analyze, check_result, extract, extract_many

__all__ = [
    "Annotation",
    "AnnotationSet",
    "AttributeType",
    "ConfigError",
    "Corpus",
    "CorpusSpec",
    "DomTree",
    "DomainSchema",
    "ExtractionResult",
    "Gazetteer",
    "ParseError",
    "StageError",
    "ThresholdSet",
    "analyze",
    "annotate",
    "build_tree",
    "check_result",
    "evaluate",
    "evaluate_corpus",
    "extract",
    "extract_many",
    "generate_corpus",
    "learn_loop",
    "learn_step",
    "load_schema",
    "parse_html",
]

__version__ = "0.1.0"
