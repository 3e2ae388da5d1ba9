# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled batched fitness kernels.

Same contract as ``_fallback``: score a population of flat weight vectors
against one sample set, returning per-agent total MSE.  The flat-vector
segment order must match ``wolfnet.network.WeightLayout`` exactly.

The heavy loops run without the GIL so that fold-level thread pools get real
parallelism.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()

IS_COMPILED = True


cdef inline double _sig(double net) nogil:
    cdef double e
    if net >= 0.0:
        return 1.0 / (1.0 + exp(-net))
    e = exp(net)
    return e / (1.0 + e)


cdef void _activate_hidden(double* net, double* out, int n, bint softmax) nogil:
    """Activate one hidden layer's input-term nets: sigmoid or layer softmax."""
    cdef int j
    cdef double m, s
    if softmax:
        m = net[0]
        for j in range(1, n):
            if net[j] > m:
                m = net[j]
        s = 0.0
        for j in range(n):
            out[j] = exp(net[j] - m)
            s += out[j]
        for j in range(n):
            out[j] /= s
    else:
        for j in range(n):
            out[j] = _sig(net[j])


def mrnn_batch_total_mse(object weights_in, object X_in, object Y_in,
                         int h1, int h2, bint softmax=False):
    """Total MSE per agent for the dual-context recurrent network."""
    cdef double[:, ::1] weights = np.ascontiguousarray(weights_in, dtype=np.float64)
    cdef double[:, ::1] X = np.ascontiguousarray(X_in, dtype=np.float64)
    cdef double[:, ::1] Y = np.ascontiguousarray(Y_in, dtype=np.float64)

    cdef int n_agents = weights.shape[0]
    cdef int d = weights.shape[1]
    cdef int n_samples = X.shape[0]
    cdef int i = X.shape[1]
    cdef int o = Y.shape[1]

    # segment offsets, in layout order
    cdef int off_w_in = 0
    cdef int off_b_h1 = off_w_in + i * h1
    cdef int off_w_c1 = off_b_h1 + h1
    cdef int off_w_12 = off_w_c1 + h1 * h1
    cdef int off_b_h2 = off_w_12 + h1 * h2
    cdef int off_w_c2 = off_b_h2 + h2
    cdef int off_w_out = off_w_c2 + h2 * h2
    cdef int off_b_out = off_w_out + h2 * o
    if off_b_out + o != d:
        raise ValueError(
            f"weight vector length {d} does not match layout total {off_b_out + o}")

    totals_arr = np.zeros(n_agents, dtype=np.float64)
    cdef double[::1] totals = totals_arr
    scratch_arr = np.zeros(2 * h1 + 2 * h2 + max(h1, h2), dtype=np.float64)
    cdef double[::1] scratch = scratch_arr

    cdef double* c1
    cdef double* c2
    cdef double* h1v
    cdef double* h2v
    cdef double* net
    cdef int a, t, j, g, k, l
    cdef double s, out_k, diff, err, total

    with nogil:
        c1 = &scratch[0]
        c2 = &scratch[h1]
        h1v = &scratch[h1 + h2]
        h2v = &scratch[2 * h1 + h2]
        net = &scratch[2 * h1 + 2 * h2]
        for a in range(n_agents):
            for j in range(h1):
                c1[j] = 0.0
            for g in range(h2):
                c2[g] = 0.0
            total = 0.0
            for t in range(n_samples):
                # first hidden layer: activated input net + activated context net
                for j in range(h1):
                    s = weights[a, off_b_h1 + j]
                    for l in range(i):
                        s += X[t, l] * weights[a, off_w_in + l * h1 + j]
                    net[j] = s
                _activate_hidden(net, h1v, h1, softmax)
                for j in range(h1):
                    s = 0.0
                    for l in range(h1):
                        s += c1[l] * weights[a, off_w_c1 + l * h1 + j]
                    h1v[j] += _sig(s)
                # second hidden layer
                for g in range(h2):
                    s = weights[a, off_b_h2 + g]
                    for l in range(h1):
                        s += h1v[l] * weights[a, off_w_12 + l * h2 + g]
                    net[g] = s
                _activate_hidden(net, h2v, h2, softmax)
                for g in range(h2):
                    s = 0.0
                    for l in range(h2):
                        s += c2[l] * weights[a, off_w_c2 + l * h2 + g]
                    h2v[g] += _sig(s)
                # output layer and per-sample error
                err = 0.0
                for k in range(o):
                    s = weights[a, off_b_out + k]
                    for g in range(h2):
                        s += h2v[g] * weights[a, off_w_out + g * o + k]
                    out_k = _sig(s)
                    diff = out_k - Y[t, k]
                    err += diff * diff
                total += err / o
                # contexts copy the fresh hidden activations
                for j in range(h1):
                    c1[j] = h1v[j]
                for g in range(h2):
                    c2[g] = h2v[g]
            totals[a] = total / n_samples
    return totals_arr


def _mlp_total_mse(object weights_in, object X_in, object Y_in,
                   int h, bint softmax, bint cascade):
    cdef double[:, ::1] weights = np.ascontiguousarray(weights_in, dtype=np.float64)
    cdef double[:, ::1] X = np.ascontiguousarray(X_in, dtype=np.float64)
    cdef double[:, ::1] Y = np.ascontiguousarray(Y_in, dtype=np.float64)

    cdef int n_agents = weights.shape[0]
    cdef int d = weights.shape[1]
    cdef int n_samples = X.shape[0]
    cdef int i = X.shape[1]
    cdef int o = Y.shape[1]

    cdef int off_w_in = 0
    cdef int off_b_h = off_w_in + i * h
    cdef int off_w_out = off_b_h + h
    cdef int off_b_out = off_w_out + h * o
    cdef int off_direct = off_b_out + o
    cdef int expected = off_direct + (i * o if cascade else 0)
    if expected != d:
        raise ValueError(
            f"weight vector length {d} does not match layout total {expected}")

    totals_arr = np.zeros(n_agents, dtype=np.float64)
    cdef double[::1] totals = totals_arr
    scratch_arr = np.zeros(2 * h, dtype=np.float64)
    cdef double[::1] scratch = scratch_arr

    cdef double* hv
    cdef double* net
    cdef int a, t, j, k, l
    cdef double s, out_k, diff, err, total

    with nogil:
        hv = &scratch[0]
        net = &scratch[h]
        for a in range(n_agents):
            total = 0.0
            for t in range(n_samples):
                for j in range(h):
                    s = weights[a, off_b_h + j]
                    for l in range(i):
                        s += X[t, l] * weights[a, off_w_in + l * h + j]
                    net[j] = s
                _activate_hidden(net, hv, h, softmax)
                err = 0.0
                for k in range(o):
                    s = weights[a, off_b_out + k]
                    for j in range(h):
                        s += hv[j] * weights[a, off_w_out + j * o + k]
                    if cascade:
                        for l in range(i):
                            s += X[t, l] * weights[a, off_direct + l * o + k]
                    out_k = _sig(s)
                    diff = out_k - Y[t, k]
                    err += diff * diff
                total += err / o
            totals[a] = total / n_samples
    return totals_arr


def mlp_batch_total_mse(weights, X, Y, int h, bint softmax=False):
    """Total MSE per agent for the single-hidden-layer perceptron."""
    return _mlp_total_mse(weights, X, Y, h, softmax, False)


def cmlp_batch_total_mse(weights, X, Y, int h, bint softmax=False):
    """Total MSE per agent for the cascade perceptron (input→output shortcuts)."""
    return _mlp_total_mse(weights, X, Y, h, softmax, True)
