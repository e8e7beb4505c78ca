"""Backend selection for the Hartree screening-potential kernel.

The compiled extension is used when it was built and ``SPDBREAK_PURE`` is not
set; otherwise the numpy implementation is used.  Both share one contract.
"""

from __future__ import annotations

import os

from ._ext import yk_py

try:
    if os.environ.get("SPDBREAK_PURE"):
        raise ImportError("pure backend requested")
    from ._ext import yk as _compiled  # type: ignore[attr-defined]
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "numpy"
yk_sym_batch = _compiled.yk_sym_batch if _compiled is not None else yk_py.yk_sym_batch
yk_sym_batch_py = yk_py.yk_sym_batch
