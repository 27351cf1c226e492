"""Legal textual entailment: condition-statement extraction, negation-parity
inference, SVM classification, masked-template augmentation, and routing."""

from .augment import (
    MASK,
    AugmentedExample,
    AugTemplate,
    make_masked_templates,
    realize_augmented,
    save_augmented,
    save_templates,
    load_templates,
    stable_seed,
)
from .pairs import (
    CondStatePair,
    QueryDecomposition,
    condition_index,
    decompose_query,
    detokenize,
    extract_pairs,
    infer_yes_no,
    load_cond_pairs,
    negate_statement,
    negation_count,
    negation_parity,
    save_cond_pairs,
    sentence_id,
    strip_point_marker,
)
from .routing import (
    QueryKind,
    detect_query_kind,
    load_answers,
    route_ensemble,
    save_answers,
)
from .svm import (
    SvmModel,
    load_svm,
    save_svm,
    svm_example_text,
    svm_predict,
    svm_train,
    svm_training_accuracy,
)

__all__ = [
    "MASK",
    "AugTemplate",
    "AugmentedExample",
    "CondStatePair",
    "QueryDecomposition",
    "QueryKind",
    "SvmModel",
    "condition_index",
    "decompose_query",
    "detect_query_kind",
    "detokenize",
    "extract_pairs",
    "infer_yes_no",
    "load_answers",
    "load_cond_pairs",
    "load_svm",
    "load_templates",
    "save_cond_pairs",
    "make_masked_templates",
    "negate_statement",
    "negation_count",
    "negation_parity",
    "realize_augmented",
    "route_ensemble",
    "save_answers",
    "save_augmented",
    "save_svm",
    "save_templates",
    "sentence_id",
    "stable_seed",
    "strip_point_marker",
    "svm_example_text",
    "svm_predict",
    "svm_train",
    "svm_training_accuracy",
]
