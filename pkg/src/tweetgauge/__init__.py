"""Disaster-tweet classification benchmark harness.

Pipeline: CSV corpus -> preprocessing -> one of three representations
(binary bag-of-words, mean-pooled static word vectors, precomputed contextual
embeddings) -> one of five classifiers (decision tree, random forest,
logistic regression, softmax head, bidirectional LSTM) -> oracle-checked
metrics (accuracy, precision, recall, F1, ROC-AUC).
"""

from .bow import BowVectorizer, Vocabulary, build_vocabulary, vectorize, vectorize_indices
from .classic import (
    DecisionTreeClassifier,
    DecisionTreeModel,
    LogisticRegressionClassifier,
    LogisticRegressionModel,
    RandomForestClassifier,
    RandomForestModel,
    clamp_scores,
    predict_score,
    predict_scores,
    train_decision_tree,
    train_logistic_regression,
    train_random_forest,
)
from .corpus import (
    CorpusStats,
    Tweet,
    TokenizedTweet,
    compute_stats,
    load_dataset,
    preprocess,
    split_train_validation,
    tokenize_corpus,
)
from .embeddings import (
    ContextualEmbeddingStore,
    MeanPoolVectorizer,
    TweetEmbedding,
    WordEmbeddingTable,
    load_contextual_store,
    load_word_vectors,
    mean_pool,
    token_vectors,
)
from .errors import ConfigError, DatasetError, DivergenceError, TweetgaugeError
from .metrics import (
    ConfusionMatrix,
    MetricsReport,
    accuracy,
    auc,
    auc_pairwise_oracle,
    compute_report,
    confusion,
    f1,
    precision,
    recall,
)
from .neural import (
    BiLstmClassifier,
    GradientCheckInstance,
    LstmCellParams,
    SoftmaxClassifier,
    TrainConfig,
    TrainReport,
    bilstm_score,
    bilstm_scores,
    gradient_check,
    lstm_cell_step,
    run_training_loop,
    softmax_probability,
    train_bilstm,
    train_softmax,
)
from .checkpoints import Checkpoint, load_checkpoint, save_checkpoint

__version__ = "1.0.0"

__all__ = [
    "BiLstmClassifier",
    "BowVectorizer",
    "Checkpoint",
    "ConfigError",
    "ConfusionMatrix",
    "ContextualEmbeddingStore",
    "CorpusStats",
    "DatasetError",
    "DecisionTreeClassifier",
    "DecisionTreeModel",
    "DivergenceError",
    "GradientCheckInstance",
    "LogisticRegressionClassifier",
    "LogisticRegressionModel",
    "LstmCellParams",
    "MeanPoolVectorizer",
    "MetricsReport",
    "RandomForestClassifier",
    "RandomForestModel",
    "SoftmaxClassifier",
    "TokenizedTweet",
    "TrainConfig",
    "TrainReport",
    "Tweet",
    "TweetEmbedding",
    "TweetgaugeError",
    "Vocabulary",
    "WordEmbeddingTable",
    "accuracy",
    "auc",
    "auc_pairwise_oracle",
    "bilstm_score",
    "bilstm_scores",
    "build_vocabulary",
    "clamp_scores",
    "compute_report",
    "compute_stats",
    "confusion",
    "f1",
    "gradient_check",
    "load_contextual_store",
    "load_checkpoint",
    "load_dataset",
    "load_word_vectors",
    "lstm_cell_step",
    "mean_pool",
    "precision",
    "predict_score",
    "predict_scores",
    "preprocess",
    "recall",
    "run_training_loop",
    "save_checkpoint",
    "softmax_probability",
    "split_train_validation",
    "token_vectors",
    "tokenize_corpus",
    "train_bilstm",
    "train_decision_tree",
    "train_logistic_regression",
    "train_random_forest",
    "train_softmax",
    "vectorize",
    "vectorize_indices",
]
