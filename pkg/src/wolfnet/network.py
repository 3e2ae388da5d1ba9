"""Flat-vector neural networks evaluated without gradients.

Three architectures share one parameter convention: every weight and bias
lives in a single flat float vector, so a population optimizer can treat a
network as a point in R^d.

``mrnn``
    Two hidden layers, each paired with a context layer holding that layer's
    previous-step activations.  A hidden neuron is the *sum of two separately
    activated terms*: the activated input net (with bias) plus the activated
    context net (no bias).  Hidden activations therefore live in (0, 2), not
    (0, 1).  The output neuron applies a plain sigmoid with bias.
``mlp``
    One hidden layer, stateless: ``out = f(V f(Wx + b) + b_out)``.
``cmlp``
    The mlp plus direct input-to-output shortcut weights inside the output
    net: ``out = f(V h + S x + b_out)``.

The flat-vector segment order is fixed and documented in
:class:`WeightLayout`; changing it would silently invalidate every stored
model, so don't.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import EvaluationError

KINDS = ("mrnn", "mlp", "cmlp")
ACTIVATIONS = ("sigmoid", "softmax")


@dataclass(frozen=True)
class Topology:
    """Architecture descriptor.

    ``hidden2`` is used by ``mrnn`` only; context layers mirror the hidden
    sizes and are not stored separately.  ``hidden_activation`` selects how a
    hidden layer's input-term net is activated: element-wise sigmoid
    (default) or a softmax over the whole layer; context terms always use
    sigmoid, the output always uses sigmoid.
    """

    kind: str
    input_size: int
    hidden1: int
    hidden2: Optional[int] = None
    output_size: int = 1
    hidden_activation: str = "sigmoid"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown network kind {self.kind!r}")
        if self.hidden_activation not in ACTIVATIONS:
            raise ValueError(f"unknown hidden activation {self.hidden_activation!r}")
        sizes = [self.input_size, self.hidden1, self.output_size]
        if self.kind == "mrnn":
            if self.hidden2 is None:
                raise ValueError("mrnn needs two hidden sizes")
            sizes.append(self.hidden2)
        elif self.hidden2 is not None:
            raise ValueError(f"{self.kind} takes a single hidden size")
        if any(s < 1 for s in sizes):
            raise ValueError("all layer sizes must be >= 1")

    @classmethod
    def mrnn(cls, input_size, hidden1, hidden2, output_size=1, hidden_activation="sigmoid"):
        return cls("mrnn", input_size, hidden1, hidden2, output_size, hidden_activation)

    @classmethod
    def mlp(cls, input_size, hidden, output_size=1, hidden_activation="sigmoid"):
        return cls("mlp", input_size, hidden, None, output_size, hidden_activation)

    @classmethod
    def cmlp(cls, input_size, hidden, output_size=1, hidden_activation="sigmoid"):
        return cls("cmlp", input_size, hidden, None, output_size, hidden_activation)


def dimension(topology: Topology) -> int:
    """Number of weights and biases, i.e. the optimizer's search dimension.

    mrnn: ``(i+1)*h1 + (h1+1)*h2 + (h2+1)*o + h1*h1 + h2*h2`` (the ``+1``
    terms are biases, the squared terms the context connections).
    mlp: ``(i+1)*h + (h+1)*o``.  cmlp adds ``i*o`` shortcut weights.
    """
    i, o = topology.input_size, topology.output_size
    if topology.kind == "mrnn":
        h1, h2 = topology.hidden1, topology.hidden2
        return (i + 1) * h1 + (h1 + 1) * h2 + (h2 + 1) * o + h1 * h1 + h2 * h2
    h = topology.hidden1
    d = (i + 1) * h + (h + 1) * o
    if topology.kind == "cmlp":
        d += i * o
    return d


# Segment tables, in flat-vector order.  Shapes are (from, to) so that
# propagation is `vector @ matrix`.
def _segment_shapes(topology: Topology):
    i, o = topology.input_size, topology.output_size
    if topology.kind == "mrnn":
        h1, h2 = topology.hidden1, topology.hidden2
        return [
            ("w_in_h1", (i, h1)),
            ("b_h1", (h1,)),
            ("w_c1_h1", (h1, h1)),
            ("w_h1_h2", (h1, h2)),
            ("b_h2", (h2,)),
            ("w_c2_h2", (h2, h2)),
            ("w_h2_out", (h2, o)),
            ("b_out", (o,)),
        ]
    h = topology.hidden1
    segments = [
        ("w_in_h", (i, h)),
        ("b_h", (h,)),
        ("w_h_out", (h, o)),
        ("b_out", (o,)),
    ]
    if topology.kind == "cmlp":
        segments.append(("w_in_out", (i, o)))
    return segments


@dataclass(frozen=True)
class WeightLayout:
    """Bijection between a flat weight vector and named parameter groups.

    Segments are contiguous, non-overlapping and cover ``[0, dimension)``
    exactly, in the order listed in :func:`_segment_shapes`.
    """

    topology: Topology
    segments: tuple  # of (name, offset, shape)
    dimension: int

    @classmethod
    def for_topology(cls, topology: Topology) -> "WeightLayout":
        segments = []
        offset = 0
        for name, shape in _segment_shapes(topology):
            segments.append((name, offset, shape))
            offset += int(np.prod(shape))
        d = dimension(topology)
        assert offset == d, "segment table disagrees with dimension()"
        return cls(topology=topology, segments=tuple(segments), dimension=d)

    def decode(self, flat: np.ndarray) -> dict:
        """Split ``flat`` into named reshaped views (no copies)."""
        flat = np.asarray(flat)
        if flat.shape != (self.dimension,):
            raise ValueError(
                f"weight vector has length {flat.shape}, layout expects ({self.dimension},)"
            )
        return {
            name: flat[offset : offset + int(np.prod(shape))].reshape(shape)
            for name, offset, shape in self.segments
        }

    def encode(self, groups: dict) -> np.ndarray:
        """Inverse of :meth:`decode`: pack named groups back into a flat vector."""
        flat = np.empty(self.dimension)
        for name, offset, shape in self.segments:
            flat[offset : offset + int(np.prod(shape))] = np.asarray(groups[name]).reshape(-1)
        return flat


@dataclass
class NetworkState:
    """Context activations carried between consecutive mrnn forward passes."""

    context1: np.ndarray
    context2: np.ndarray


def reset_state(topology: Topology) -> NetworkState:
    """Zeroed contexts; the state every evaluation sequence starts from."""
    if topology.kind != "mrnn":
        raise ValueError(f"{topology.kind} networks are stateless")
    return NetworkState(np.zeros(topology.hidden1), np.zeros(topology.hidden2))


def sigmoid(net):
    """Logistic function, strictly inside (0, 1) for finite input."""
    net = np.asarray(net, dtype=float)
    out = np.empty_like(net)
    pos = net >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-net[pos]))
    e = np.exp(net[~pos])  # split by sign to avoid overflow warnings
    out[~pos] = e / (1.0 + e)
    return float(out) if out.ndim == 0 else out


def softmax(net):
    net = np.asarray(net, dtype=float)
    shifted = np.exp(net - net.max())
    return shifted / shifted.sum()


def _hidden_activation(net, topology: Topology):
    if topology.hidden_activation == "softmax":
        return softmax(net)
    return sigmoid(net)


def _check_finite(weights, inputs):
    if not np.all(np.isfinite(weights)):
        raise EvaluationError("weight vector contains non-finite values")
    if not np.all(np.isfinite(inputs)):
        raise EvaluationError("input vector contains non-finite values")


def forward_mrnn(
    layout: WeightLayout, weights: np.ndarray, inputs: np.ndarray, state: NetworkState
):
    """One recurrent forward pass.

    Each hidden neuron sums its activated input-term net (with bias) and its
    activated context-term net.  The returned state holds exact copies of the
    fresh hidden activations, ready to feed the next pass.
    """
    topology = layout.topology
    if topology.kind != "mrnn":
        raise ValueError("forward_mrnn requires an mrnn layout")
    inputs = np.asarray(inputs, dtype=float)
    if inputs.shape != (topology.input_size,):
        raise ValueError(
            f"input has shape {inputs.shape}, expected ({topology.input_size},)"
        )
    _check_finite(weights, inputs)
    g = layout.decode(weights)

    h1 = _hidden_activation(inputs @ g["w_in_h1"] + g["b_h1"], topology) + sigmoid(
        state.context1 @ g["w_c1_h1"]
    )
    h2 = _hidden_activation(h1 @ g["w_h1_h2"] + g["b_h2"], topology) + sigmoid(
        state.context2 @ g["w_c2_h2"]
    )
    output = sigmoid(h2 @ g["w_h2_out"] + g["b_out"])
    return output, NetworkState(h1.copy(), h2.copy())


def forward_mlp(layout: WeightLayout, weights: np.ndarray, inputs: np.ndarray) -> np.ndarray:
    """Stateless single-hidden-layer pass."""
    topology = layout.topology
    if topology.kind != "mlp":
        raise ValueError("forward_mlp requires an mlp layout")
    inputs = np.asarray(inputs, dtype=float)
    if inputs.shape != (topology.input_size,):
        raise ValueError(f"input has shape {inputs.shape}, expected ({topology.input_size},)")
    _check_finite(weights, inputs)
    g = layout.decode(weights)
    h = _hidden_activation(inputs @ g["w_in_h"] + g["b_h"], topology)
    return sigmoid(h @ g["w_h_out"] + g["b_out"])


def forward_cmlp(layout: WeightLayout, weights: np.ndarray, inputs: np.ndarray) -> np.ndarray:
    """Stateless pass with direct input-to-output shortcuts in the output net."""
    topology = layout.topology
    if topology.kind != "cmlp":
        raise ValueError("forward_cmlp requires a cmlp layout")
    inputs = np.asarray(inputs, dtype=float)
    if inputs.shape != (topology.input_size,):
        raise ValueError(f"input has shape {inputs.shape}, expected ({topology.input_size},)")
    _check_finite(weights, inputs)
    g = layout.decode(weights)
    h = _hidden_activation(inputs @ g["w_in_h"] + g["b_h"], topology)
    return sigmoid(h @ g["w_h_out"] + g["b_out"] + inputs @ g["w_in_out"])


def mse(outputs: Sequence[float], targets: Sequence[float]) -> float:
    """Mean squared error over one sample's output neurons."""
    outputs = np.asarray(outputs, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if outputs.shape != targets.shape or outputs.size == 0:
        raise ValueError("outputs and targets must be equal-length and non-empty")
    diff = outputs - targets
    return float(np.mean(diff * diff))


def total_mse(per_sample_mses: Sequence[float]) -> float:
    """Mean of per-sample errors over the whole pattern set."""
    per_sample_mses = np.asarray(per_sample_mses, dtype=float)
    if per_sample_mses.size == 0:
        raise ValueError("need at least one per-sample error")
    return float(per_sample_mses.mean())
