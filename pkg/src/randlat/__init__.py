"""Numerical laboratory for one-dimensional chains with random mass defects.

Exact time-domain and frequency-domain solvers, closed-form large-distance
asymptotics, diffusion-limit transmittance statistics, and deterministic
Monte Carlo campaigns that cross-validate all of them.
"""

__version__ = "0.1.0"

from .core import (BandEdgeError, DispersionPoint, FrontParams, LatticeConfig,
                   NoStationaryPointError, band_edges, dispersion, front_params,
                   spectral_amplitude, stationary_frequencies, wavenumber)
from .specfun import airy_ai, bessel_j, bessel_j_orders, legendre_conical, phi_n
from .timedomain import (CausalityError, InitialCondition, MassProfile,
                         TrajectoryRecord, impulse, simulate, uniform_profile)
from .scattering import (HarmonicSetup, ScatteringResult, SolverSingularError,
                         harmonic_setup, reflect_evanescent, solve_matched_recursion,
                         solve_matched_toeplitz, solve_nonmatched,
                         transmission_batch)
from .transtats import (CorrelationModel, TransmittanceMoments, density,
                        gamma_correlated, gamma_iid, localization_length,
                        moments_matched, moments_nonmatched_left,
                        moments_nonmatched_right, spectral_density)
from .asymptotics import (FieldEstimate, FieldQuery, mean_bulk, mean_front,
                          sample_transmitted_bulk, unperturbed_bulk,
                          unperturbed_front)
from .ensemble import DisorderSpec, EnsembleSummary, draw_profile, run_campaign
