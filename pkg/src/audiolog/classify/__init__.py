"""Environment decision tree, mood network and evaluation."""

from .labels import ENVIRONMENT_CLASSES, MOOD_CLASSES, EnvironmentLabel, MoodLabel
from .metrics import Metrics, confusion_metrics, evaluate
from .mlp import MlpConfig, MlpModel, classify_mood, train_mlp
from .tree import DecisionTree, TreeConfig, classify_environment, train_tree

__all__ = [
    "ENVIRONMENT_CLASSES",
    "MOOD_CLASSES",
    "DecisionTree",
    "EnvironmentLabel",
    "Metrics",
    "MlpConfig",
    "MlpModel",
    "MoodLabel",
    "TreeConfig",
    "classify_environment",
    "classify_mood",
    "confusion_metrics",
    "evaluate",
    "train_mlp",
    "train_tree",
]
