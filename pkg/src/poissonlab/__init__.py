"""Poisson configuration experiments over infinite measure preserving maps.

The package builds point-process samplers over three exactly computable
base systems, and verifies structural identities connecting base-set
statistics with the induced configuration dynamics: covariance/overlap
identities, rigidity and independence transfer, the exponential calculus
of spectral measures and of operators on symmetric tensor towers, and the
structure of coupled (joined) samplers.
"""

from .errors import (AmbiguousPairing, BadScales, CapExceeded, ConfigError,
                     DegeneratePhases, DomainEscape, GridMismatch,
                     InsufficientTrials, Level1NotPreserved,
                     MassInconsistency, NormExceeded, NotDecreasing,
                     NotProjection, NotWandering, PoissonLabError,
                     ReconstructionFailure, StageOverflow,
                     TailToleranceUnreachable, WindowViolation)
from .intervals import IntervalSet
from .systems import (BooleMap, IntegerTranslation, RankOneSpec,
                      RankOneTower, TowerState, build_tower,
                      intersect_sequence, lagged_overlap, orbit_window,
                      symmetric_diff_measure, wandering_check)
from .sampling import (Configuration, CovarianceEstimate, SeededSampler,
                       count, estimate_count_covariance, pushforward,
                       sample_poisson)
from .spectral import (CircleMeasure, ExpSpectralType, convolve,
                       exp_spectral_type, factorial_tail, overlap,
                       sequence_to_measure, spectral_sequence)
from .fock import (FockOperator, SymFockSpace, ageev_check,
                   exponential_limit_check, fock_exponential,
                   markov_restriction_check)
from .mixing import (MixingReport, dissipative_independence_experiment,
                     ergodic_average_experiment, rigidity_experiment,
                     zero_type_experiment)
from .joinings import (CoupledPart, JoiningSpec, builtin_specs,
                       cross_covariance_test, diagonal_spec,
                       id_superposition_test, lift_scaled_coupling,
                       marginal_test, product_spec,
                       reconstruct_from_marginals, sample_graph_pair,
                       sample_joining)

__version__ = "0.1.0"
