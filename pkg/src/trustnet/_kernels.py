"""Kernel backend selection: compiled extension if importable, else numpy.

Set TRUSTNET_PURE=1 to force the pure backend (used by the benchmark and
the backend-equivalence tests).
"""

import os

if os.environ.get("TRUSTNET_PURE"):
    from . import _pykern as _impl

    BACKEND = "python"
else:
    try:
        from . import _ckern as _impl

        BACKEND = "cython"
    except ImportError:
        from . import _pykern as _impl

        BACKEND = "python"

goodness_sums = _impl.goodness_sums
fairness_sums = _impl.fairness_sums
cautious_round = _impl.cautious_round
