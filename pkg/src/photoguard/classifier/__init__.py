"""Photo content classification: features, softmax model, evaluation, handles."""

from .features import ExtractorConfig, DEFAULT_EXTRACTOR, FeatureExtractionError, extract_features
from .model import (
    Dataset,
    Gradient,
    LabeledSample,
    ModelMetadata,
    SoftmaxModel,
    Split,
    TrainingDivergedError,
    TrainingParams,
    TrainingResult,
    accuracy,
    cross_entropy_loss,
    loss_gradient,
    predict,
    split_dataset,
    train,
)
from .evaluate import (
    ConfusionMatrix,
    accuracy_from_matrix,
    confusion_matrix,
    per_class_accuracy,
    private_to_public_leak_rate,
)
from .handles import ClassifierError, ModelClassifier, StubClassifier, classify_file
from .remote import ClassifierServer, RemoteClassifier

__all__ = [
    "ClassifierError",
    "ClassifierServer",
    "ConfusionMatrix",
    "Dataset",
    "DEFAULT_EXTRACTOR",
    "ExtractorConfig",
    "FeatureExtractionError",
    "Gradient",
    "LabeledSample",
    "ModelClassifier",
    "ModelMetadata",
    "RemoteClassifier",
    "SoftmaxModel",
    "Split",
    "StubClassifier",
    "TrainingDivergedError",
    "TrainingParams",
    "TrainingResult",
    "accuracy",
    "accuracy_from_matrix",
    "classify_file",
    "confusion_matrix",
    "cross_entropy_loss",
    "extract_features",
    "loss_gradient",
    "per_class_accuracy",
    "predict",
    "private_to_public_leak_rate",
    "split_dataset",
    "train",
]
