"""Numerical workbench for caustics of oscillatory integrals and Fourier integral operator kernels."""

from .cutoffs import BumpPair, DyadicIndex, enumerate_pieces, make_bump_pair, partition_residual, sigma0
from .estimates import (GridSpec, NormEstimate, atom_factor, l1_l2_piece_proxy, lq_norm, make_atom,
                        sublevel_measure, sup_norm, vanishing_integral)
from .exponents import (classify_pq, halfwave_orders, hardy_order, predicted_lq_growth, region_vertices,
                        sobolev_order)
from .fitting import FitResult, fit_exponent
from .harness import Report, SweepConfig, run_sweep, verify
from .oscillatory import airy, integrate_osc, piece_kernel, u_tau
from .phases import (CausticProfile, PhaseFunction, SchurBlocks, caustic_distance, classify_caustic,
                     eval_derivative, find_stationary_points, make_model_phase, parse_phase, reduce_variables,
                     schur_determinant)

__version__ = "0.1.0"
