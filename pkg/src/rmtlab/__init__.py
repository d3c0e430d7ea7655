"""rmtlab: random-matrix ensembles, spectral statistics, and mean-field
integral cross-checks of the density of states."""

__version__ = "0.1.0"

from .ensembles import (EnsembleKind, EnsembleSpec, HermitianMatrix, Normalization,
                        OrbitMap, independent_parameter_count, orbit_map, sample,
                        sample_flip2d, sample_folded3d, sample_gue, sample_hier_iso,
                        sample_hier_toy)
from .spectra import (DOSEstimate, R2Estimate, SpectrumBatch, collect_spectra,
                      dos_distance, eigenvalues, estimate_dos, fit_power_law,
                      fit_semiellipse, operator_norm, pair_correlation, support_edge,
                      tail_probability)
from .streams import RandomStream
from .susy import QuadratureConfig, leading_order_nu, normalization_identity, nu_susy
from .theory import (critical_points, action_re, gue_joint_density2, lemma1_bound,
                     saddle_energy, semicircle, sine_kernel_r2, tadpole_self_energy)

__all__ = [
    "__version__",
    "EnsembleKind", "EnsembleSpec", "HermitianMatrix", "Normalization", "OrbitMap",
    "independent_parameter_count", "orbit_map", "sample", "sample_flip2d",
    "sample_folded3d", "sample_gue", "sample_hier_iso", "sample_hier_toy",
    "DOSEstimate", "R2Estimate", "SpectrumBatch", "collect_spectra", "dos_distance",
    "eigenvalues", "estimate_dos", "fit_power_law", "fit_semiellipse",
    "operator_norm", "pair_correlation", "support_edge", "tail_probability",
    "RandomStream",
    "QuadratureConfig", "leading_order_nu", "normalization_identity", "nu_susy",
    "critical_points", "action_re", "gue_joint_density2", "lemma1_bound",
    "saddle_energy", "semicircle", "sine_kernel_r2", "tadpole_self_energy",
]
