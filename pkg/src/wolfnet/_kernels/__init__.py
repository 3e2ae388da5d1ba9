"""Batched fitness kernels with import-time backend selection.

The compiled Cython core is preferred when the extension built; otherwise the
pure-numpy fallback takes over transparently.  ``WOLFNET_KERNEL`` overrides
the choice (``compiled``, ``pure``, or ``auto``), which is mainly useful for
the kernel benchmark and for debugging suspected kernel mismatches.

Both backends expose the same three functions:

    mrnn_batch_total_mse(weights, X, Y, h1, h2, softmax=False) -> (agents,)
    mlp_batch_total_mse(weights, X, Y, h, softmax=False)       -> (agents,)
    cmlp_batch_total_mse(weights, X, Y, h, softmax=False)      -> (agents,)
"""

import os

from . import _fallback

try:
    from . import _core
except ImportError:
    _core = None


def available_backends():
    names = ["pure"]
    if _core is not None:
        names.insert(0, "compiled")
    return tuple(names)


def get_backend(name: str = "auto"):
    """Return the kernel module for ``name`` (``auto``/``compiled``/``pure``)."""
    if name == "auto":
        name = os.environ.get("WOLFNET_KERNEL", "auto")
    if name in ("auto", ""):
        return _core if _core is not None else _fallback
    if name == "compiled":
        if _core is None:
            raise ValueError("compiled kernel requested but the extension is not built")
        return _core
    if name == "pure":
        return _fallback
    raise ValueError(f"unknown kernel backend {name!r}")


def backend_name(name: str = "auto") -> str:
    return "compiled" if get_backend(name).IS_COMPILED else "pure"
