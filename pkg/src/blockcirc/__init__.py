"""Spectral laboratory for symmetric m-block circulant random matrix ensembles."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    CIRCULANT,
    PATTERN,
    TOEPLITZ,
    EnsembleSpec,
    EntryDistribution,
    InvariantViolation,
    Pattern,
    SymmetricMatrix,
)
from .ensembles import LinkKey, build_matrix, count_free_parameters, link_key  # noqa: E402
from .spectra import SpectralMeasure, eigs_block_circulant, eigs_dense, spectrum  # noqa: E402
from .moments import epsilon_table, genus, limiting_moment  # noqa: E402
from .closedform import density, phi, wigner_density  # noqa: E402
from .genpattern import (  # noqa: E402
    classify_zone,
    fourth_moment_analytic,
    pattern_moment_finite_exact,
    pattern_moment_pairing_count,
)

__all__ = [
    "CIRCULANT", "PATTERN", "TOEPLITZ", "EnsembleSpec", "EntryDistribution",
    "InvariantViolation", "Pattern", "SymmetricMatrix", "LinkKey", "build_matrix",
    "count_free_parameters", "link_key", "SpectralMeasure", "eigs_block_circulant",
    "eigs_dense", "spectrum", "epsilon_table", "genus", "limiting_moment", "density",
    "phi", "wigner_density", "classify_zone", "fourth_moment_analytic",
    "pattern_moment_finite_exact", "pattern_moment_pairing_count",
]
