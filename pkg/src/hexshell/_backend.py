"""Selection between the compiled engine and the pure-Python code paths."""

from __future__ import annotations

import os

try:  # pragma: no cover - depends on the build
    from . import _engine as _native
except ImportError:  # pragma: no cover
    _native = None

HAVE_NATIVE = _native is not None


def engine(backend: str | None = None):
    """The native engine wrapper, or None for the Python reference code.

    ``backend`` is ``"native"``, ``"python"`` or None (use the environment
    variable ``HEXSHELL_BACKEND``, defaulting to native when built).
    """
    choice = backend or os.environ.get("HEXSHELL_BACKEND", "auto")
    if choice == "python":
        return None
    if choice == "native" and _native is None:
        raise ImportError("the compiled hexshell engine is not available")
    if _native is None:
        return None
    from . import _native_api

    return _native_api
