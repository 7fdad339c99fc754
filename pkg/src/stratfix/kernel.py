"""Kernel selection: compiled extension when available, pure twin otherwise.

Set ``STRATFIX_PURE=1`` to force the pure-Python kernel (used by the
parity tests and the benchmark).
"""

import os

if os.environ.get("STRATFIX_PURE"):
    from stratfix import _kernel_py as _impl
else:
    try:
        from stratfix import _kernel as _impl  # type: ignore[attr-defined]
    except ImportError:
        from stratfix import _kernel_py as _impl

BACKEND = _impl.BACKEND
check_monotone = _impl.check_monotone
enum_monotone = _impl.enum_monotone
dagger_table = _impl.dagger_table
