"""Hot loops: compiled Cython core with a numpy fallback chosen at import.

Set ``GAUSSENTROPY_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _fallback

BACKEND = "python"

if not os.environ.get("GAUSSENTROPY_PURE_PYTHON"):
    try:
        from . import _core as _impl
    except ImportError:
        _impl = _fallback
    else:
        BACKEND = "cython"
else:
    _impl = _fallback

hermite_diagonal = _impl.hermite_diagonal
sector_hamiltonian = _impl.sector_hamiltonian
secular_roots = _impl.secular_roots
arrowhead_vectors = _impl.arrowhead_vectors

__all__ = ["BACKEND", "hermite_diagonal", "sector_hamiltonian", "secular_roots", "arrowhead_vectors"]
