"""Pure-numpy batched fitness kernels.

Drop-in replacement for the compiled extension: identical function
signatures, vectorized over the agent axis instead of compiled loops.  Each
function scores a whole population of flat weight vectors against one sample
set and returns the per-agent mean-of-per-sample mean squared error.

The flat-vector segment order must match ``wolfnet.network.WeightLayout``
exactly; the offsets below are that contract, restated.
"""

from __future__ import annotations

import numpy as np

IS_COMPILED = False


def _sigmoid(net):
    out = np.empty_like(net)
    pos = net >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-net[pos]))
    e = np.exp(net[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _softmax_last(net):
    shifted = np.exp(net - net.max(axis=-1, keepdims=True))
    return shifted / shifted.sum(axis=-1, keepdims=True)


def _hidden(net, softmax):
    return _softmax_last(net) if softmax else _sigmoid(net)


def mrnn_batch_total_mse(weights, X, Y, h1, h2, softmax=False):
    """Total MSE per agent for the dual-context recurrent network.

    ``weights`` is (agents, d); ``X`` (samples, inputs); ``Y`` (samples,
    outputs).  Samples are fed in row order with contexts starting at zero
    and carrying from one sample to the next.
    """
    weights = np.ascontiguousarray(weights, dtype=float)
    X = np.ascontiguousarray(X, dtype=float)
    Y = np.ascontiguousarray(Y, dtype=float)
    n_agents, d = weights.shape
    n_samples, i = X.shape
    o = Y.shape[1]

    off = 0
    w_in = weights[:, off : off + i * h1].reshape(n_agents, i, h1); off += i * h1
    b_h1 = weights[:, off : off + h1]; off += h1
    w_c1 = weights[:, off : off + h1 * h1].reshape(n_agents, h1, h1); off += h1 * h1
    w_12 = weights[:, off : off + h1 * h2].reshape(n_agents, h1, h2); off += h1 * h2
    b_h2 = weights[:, off : off + h2]; off += h2
    w_c2 = weights[:, off : off + h2 * h2].reshape(n_agents, h2, h2); off += h2 * h2
    w_out = weights[:, off : off + h2 * o].reshape(n_agents, h2, o); off += h2 * o
    b_out = weights[:, off : off + o]; off += o
    if off != d:
        raise ValueError(f"weight vector length {d} does not match layout total {off}")

    c1 = np.zeros((n_agents, h1))
    c2 = np.zeros((n_agents, h2))
    totals = np.zeros(n_agents)
    for t in range(n_samples):
        x = X[t]
        h1v = _hidden(x @ w_in + b_h1, softmax) + _sigmoid(
            np.einsum("aj,ajk->ak", c1, w_c1)
        )
        h2v = _hidden(np.einsum("aj,ajk->ak", h1v, w_12) + b_h2, softmax) + _sigmoid(
            np.einsum("aj,ajk->ak", c2, w_c2)
        )
        out = _sigmoid(np.einsum("aj,ajk->ak", h2v, w_out) + b_out)
        diff = out - Y[t]
        totals += np.mean(diff * diff, axis=1)
        c1, c2 = h1v, h2v
    return totals / n_samples


def _mlp_parts(weights, i, h, o, cascade):
    n_agents, d = weights.shape
    off = 0
    w_in = weights[:, off : off + i * h].reshape(n_agents, i, h); off += i * h
    b_h = weights[:, off : off + h]; off += h
    w_out = weights[:, off : off + h * o].reshape(n_agents, h, o); off += h * o
    b_out = weights[:, off : off + o]; off += o
    w_direct = None
    if cascade:
        w_direct = weights[:, off : off + i * o].reshape(n_agents, i, o); off += i * o
    if off != d:
        raise ValueError(f"weight vector length {d} does not match layout total {off}")
    return w_in, b_h, w_out, b_out, w_direct


def _mlp_total_mse(weights, X, Y, h, softmax, cascade):
    weights = np.ascontiguousarray(weights, dtype=float)
    X = np.ascontiguousarray(X, dtype=float)
    Y = np.ascontiguousarray(Y, dtype=float)
    i, o = X.shape[1], Y.shape[1]
    w_in, b_h, w_out, b_out, w_direct = _mlp_parts(weights, i, h, o, cascade)

    # (agents, samples, h) — stateless, so both axes batch at once
    hv = _hidden(np.einsum("si,aih->ash", X, w_in) + b_h[:, None, :], softmax)
    net = np.einsum("ash,aho->aso", hv, w_out) + b_out[:, None, :]
    if cascade:
        net += np.einsum("si,aio->aso", X, w_direct)
    diff = _sigmoid(net) - Y[None, :, :]
    return np.mean(diff * diff, axis=2).mean(axis=1)


def mlp_batch_total_mse(weights, X, Y, h, softmax=False):
    """Total MSE per agent for the single-hidden-layer perceptron."""
    return _mlp_total_mse(weights, X, Y, h, softmax, cascade=False)


def cmlp_batch_total_mse(weights, X, Y, h, softmax=False):
    """Total MSE per agent for the cascade perceptron (input→output shortcuts)."""
    return _mlp_total_mse(weights, X, Y, h, softmax, cascade=True)
