"""Truncated Fock-space representation of operator wave functions."""

from .basis import FockSpace, OpSpaceBasis, SectorBasis, enumerate_basis, fnv1a_64, sector_basis, sector_ladder
from .cache import (
    CACHE_VERSION,
    CacheCorruptError,
    CacheError,
    CacheHashError,
    CacheVersionError,
    cache_read,
    cache_write,
)
from .represent import (
    GramWeights,
    PhysicalBasis,
    SuperMatrix,
    bracket,
    gram_weights,
    hermitian_check,
    inner_product,
    norm_squared,
    physical_basis,
    represent,
    restrict,
)

__all__ = [
    "CACHE_VERSION",
    "CacheCorruptError",
    "CacheError",
    "CacheHashError",
    "CacheVersionError",
    "FockSpace",
    "GramWeights",
    "OpSpaceBasis",
    "PhysicalBasis",
    "SectorBasis",
    "SuperMatrix",
    "bracket",
    "cache_read",
    "cache_write",
    "enumerate_basis",
    "fnv1a_64",
    "gram_weights",
    "hermitian_check",
    "inner_product",
    "norm_squared",
    "physical_basis",
    "represent",
    "restrict",
    "sector_basis",
    "sector_ladder",
]
