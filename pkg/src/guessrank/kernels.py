"""Backend selection for the rank-search kernels.

The compiled extension is preferred when it imported cleanly; the pure
backend is always available. ``GUESSRANK_BACKEND=pure`` (or
``compiled``) forces a choice, mainly for the backend-comparison
benchmark.
"""

import os

from . import _ranksearch_py as pure

try:
    from . import _ranksearch as compiled
except ImportError:  # pragma: no cover - depends on the build
    compiled = None

_FORCED = os.environ.get("GUESSRANK_BACKEND", "").strip().lower()


def available_backends():
    names = ["compiled", "pure"] if compiled is not None else ["pure"]
    return names


def get_backend(name=None):
    """Return the kernel module for ``name`` (default: best available)."""
    if name is None:
        name = _FORCED or ("compiled" if compiled is not None else "pure")
    if name == "compiled":
        if compiled is None:
            raise ValueError("the compiled kernel extension is not available")
        return compiled
    if name == "pure":
        return pure
    raise ValueError(f"unknown kernel backend {name!r}")


def default_backend_name():
    return get_backend().BACKEND
