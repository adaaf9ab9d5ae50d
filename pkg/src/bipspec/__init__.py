"""Spectra of random bipartite graphs against the Marchenko-Pastur limit law.

Library layout:

* :mod:`bipspec.mplaw` -- the limit law: densities, interval masses, CDF.
* :mod:`bipspec.graphs` -- graph ensembles, normalization, edge-list IO.
* :mod:`bipspec.factors` -- degree-constrained subgraphs via the subset
  criterion and via max-flow.
* :mod:`bipspec.spectra` -- block-matrix spectra, interval counts, window
  trace statistics.
* :mod:`bipspec.experiments` -- seeded Monte-Carlo experiments with
  reproducible, canonical reports.
* :mod:`bipspec.cli` -- the ``bipspec`` command-line front end.
"""

__version__ = "0.1.0"

from .mplaw import (  # noqa: E402
    Interval,
    LimitLaw,
    QuadratureError,
    cdf,
    measure,
    mp_density,
    sym_density,
)
from .graphs import (  # noqa: E402
    BipartiteGraph,
    DegreeSpec,
    DenseSymmetric,
    EdgeListFormatError,
    default_mixing_steps,
    is_regular,
    normalized_er,
    normalized_regular,
    read_edge_list,
    sample_er,
    sample_regular,
    write_edge_list,
)
from .factors import (  # noqa: E402
    FactorOutcome,
    FactorSpec,
    SubsetEnumerationLimit,
    find_f_factor,
    ore_ryser_check,
    regular_factor_check,
)
from .spectra import (  # noqa: E402
    Spectrum,
    WindowPair,
    bipartite_spectrum,
    count_in_interval,
    singular_values,
    trace_statistic,
    window_pair,
    write_spectrum_csv,
)
from .experiments import (  # noqa: E402
    ExperimentReport,
    InfeasibleConfigError,
    LocalLawConfig,
    concentration_tail_check,
    convergence_rate_sweep,
    default_interval_grid,
    esd_kolmogorov_distance,
    estimate_regularity_probability,
    guaranteed_interval_length,
    regular_factor_frequency,
    run_local_law_er,
    run_local_law_regular,
    stable_trial_seed,
    wilson_interval,
)

__all__ = [
    "__version__",
    "Interval",
    "LimitLaw",
    "QuadratureError",
    "cdf",
    "measure",
    "mp_density",
    "sym_density",
    "BipartiteGraph",
    "DegreeSpec",
    "DenseSymmetric",
    "EdgeListFormatError",
    "default_mixing_steps",
    "is_regular",
    "normalized_er",
    "normalized_regular",
    "read_edge_list",
    "sample_er",
    "sample_regular",
    "write_edge_list",
    "FactorOutcome",
    "FactorSpec",
    "SubsetEnumerationLimit",
    "find_f_factor",
    "ore_ryser_check",
    "regular_factor_check",
    "Spectrum",
    "WindowPair",
    "bipartite_spectrum",
    "count_in_interval",
    "singular_values",
    "trace_statistic",
    "window_pair",
    "write_spectrum_csv",
    "ExperimentReport",
    "InfeasibleConfigError",
    "LocalLawConfig",
    "concentration_tail_check",
    "convergence_rate_sweep",
    "default_interval_grid",
    "esd_kolmogorov_distance",
    "estimate_regularity_probability",
    "guaranteed_interval_length",
    "regular_factor_frequency",
    "run_local_law_er",
    "run_local_law_regular",
    "stable_trial_seed",
    "wilson_interval",
]
