"""clueguard: probe and harden text classifiers against easy-clue exploitation.

The toolkit ranks discriminative unigrams by chi-squared score, generates
targeted mask-and-refill augmentation, injects adversarial trigger phrases
into evaluation sets, and measures the resulting F1 collapse and recovery
with a built-in bag-of-words baseline or an external model backend.
"""

from .augmentor import (
    MASK_TOKEN,
    AugmentedExample,
    AugmentError,
    BackendFiller,
    ClassConditionalFiller,
    Fill,
    MaskedExample,
    MaskFiller,
    augment_dataset,
    augment_records,
    backend_fill,
    class_conditional_fill,
    mask_example,
    write_provenance,
)
from .baseline import DEFAULT_ALPHA, NBModel, load_nb, save_nb, train_nb
from .corpus import (
    DEFAULT_MIN_DF,
    DataError,
    Example,
    Label,
    LabeledDataset,
    ParseError,
    Split,
    Vocabulary,
    build_vocab,
    load_tsv,
    parse_tsv,
    save_tsv,
    serialize_tsv,
    token_spans,
    tokenize,
)
from .evaluator import (
    Classifier,
    Confusion,
    EvalReport,
    RobustnessReport,
    aggregate,
    format_mean_std,
    robustness,
    score,
)
from .feature_stats import (
    DEFAULT_TOP_N,
    ReplacementSet,
    TermScore,
    chi2_scores,
    load_replacement_set,
    save_replacement_set,
    top_n,
)
from .perturber import DEFAULT_TRIGGER, TriggerSpec, perturb_dataset, render_trigger
from .protocol import (
    PROTOCOL_VERSION,
    BackendClassifier,
    BackendError,
    BackendHandle,
    BackendRequest,
    BackendResponse,
    CapabilityError,
    ProtocolError,
    RemoteError,
    TransportError,
    VersionMismatchError,
    connect,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # corpus
    "Label", "Split", "Example", "LabeledDataset", "Vocabulary",
    "ParseError", "DataError", "DEFAULT_MIN_DF",
    "parse_tsv", "load_tsv", "serialize_tsv", "save_tsv",
    "tokenize", "token_spans", "build_vocab",
    # feature_stats
    "TermScore", "ReplacementSet", "DEFAULT_TOP_N",
    "chi2_scores", "top_n", "save_replacement_set", "load_replacement_set",
    # augmentor
    "MASK_TOKEN", "MaskedExample", "Fill", "AugmentedExample", "AugmentError",
    "MaskFiller", "ClassConditionalFiller", "BackendFiller",
    "mask_example", "class_conditional_fill", "backend_fill",
    "augment_records", "augment_dataset", "write_provenance",
    # perturber
    "DEFAULT_TRIGGER", "TriggerSpec", "render_trigger", "perturb_dataset",
    # baseline
    "DEFAULT_ALPHA", "NBModel", "train_nb", "save_nb", "load_nb",
    # evaluator
    "Confusion", "EvalReport", "RobustnessReport", "Classifier",
    "score", "aggregate", "robustness", "format_mean_std",
    # protocol
    "PROTOCOL_VERSION", "BackendRequest", "BackendResponse", "BackendHandle",
    "BackendClassifier", "BackendError", "TransportError", "ProtocolError",
    "VersionMismatchError", "CapabilityError", "RemoteError", "connect",
]
