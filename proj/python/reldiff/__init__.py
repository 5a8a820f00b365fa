"""Relativistic momentum-space diffusions.

Equilibrium laws, admissibility checks, path simulation, spectral gaps and
certified convergence rates for a family of spherically symmetric diffusions.
The heavy lifting lives in the compiled extension ``reldiff._core``.
"""

import os
import sys

try:
    from ._core import *  # noqa: F401,F403
    from ._core import __version__  # noqa: F401
except ImportError:  # pragma: no cover - source-tree fallback
    # In-tree runs (ctest, editable checkouts) point RELDIFF_EXT_DIR at the
    # directory that holds the freshly built extension.
    _ext_dir = os.environ.get("RELDIFF_EXT_DIR")
    if not _ext_dir:
        raise
    sys.path.insert(0, _ext_dir)
    try:
        from _core import *  # noqa: F401,F403
        from _core import __version__  # noqa: F401
    finally:
        sys.path.pop(0)
