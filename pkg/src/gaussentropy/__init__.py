"""Entropy production and its correlation constituents in open Gaussian systems.

Fermionic states are correlation matrices, bosonic states are covariance
matrices; both evolve exactly under quadratic Hamiltonians with finite
discretised baths. A many-body oracle checks the fermionic route, and a
counting-statistics module gives two-bath transport references.
"""

from ._kernels import BACKEND
from .boson_gaussian import BosonBathSpec, bose_entropy_ledger, simulate_bose
from .fermion_gaussian import FermionBathSpec, entropy_ledger, simulate
from .ledger import EntropyLedger

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BosonBathSpec",
    "EntropyLedger",
    "FermionBathSpec",
    "bose_entropy_ledger",
    "entropy_ledger",
    "simulate",
    "simulate_bose",
    "__version__",
]
