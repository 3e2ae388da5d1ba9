"""Gradient-free neural-network training with grey wolf optimizers.

The package couples box-constrained swarm optimizers (a classic three-leader
grey wolf optimizer and a four-leader variant with distance averaging) to
small neural classifiers (a dual-context recurrent network, a one-hidden-layer
perceptron, and a cascade perceptron with input-to-output shortcuts).  Model
weights live in a flat vector so that a wolf position *is* a candidate network.
Evaluation utilities cover stratified k-fold cross-validation, confusion-matrix
statistics and trapezoidal ROC/AUC.
"""

__version__ = "0.1.0"

from .errors import DatasetError, EvaluationError, WolfnetError

__all__ = ["DatasetError", "EvaluationError", "WolfnetError", "__version__"]
