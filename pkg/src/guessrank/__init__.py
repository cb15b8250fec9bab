"""Monte Carlo password guess-rank estimation."""

from .corpus import PasswordCorpus, corpus_from_pairs, load_corpus, load_corpus_file, top_n
from .errors import (
    CorpusFormatError,
    DrawBudgetError,
    EmptyCorpusError,
    EnumerationBudgetError,
    FileFormatError,
    GuessrankError,
    MissingEstimateError,
    TableMismatchError,
    TrainingError,
)
from .estimator import (
    BinIndex,
    RankEstimate,
    SampleTable,
    build_bins,
    build_sample,
    compress,
    default_bins,
    estimate_many,
    estimate_rank,
    load_table,
    save_table,
    table_from_neglogs,
    uniform_bins,
)
from .kernels import available_backends, default_backend_name
from .metrics import ErrorReport, bench_estimation, error_report, overlap, top_k_exact
from .models import (
    BackoffModel,
    NGramModel,
    PcfgModel,
    load_model,
    train_backoff,
    train_ngram,
    train_pcfg,
)
from .oracle import RankedList, build_ranked_list, true_rank

__version__ = "0.1.0"
