"""
Quantum speed limits for systems coupled to thermal baths
=========================================================

thermoqsl evaluates the Mondal-Datta-Sazim speed limit, driven by the
Wigner-Yanase skew information of a system + thermal bath, together with
three relaxed upper estimates of that information:

* a variance bound (``relaxed_bound``),
* a temperature-explicit bound built from ``[H^int, H^B]`` (``t_trick_bound``),
* a temperature-explicit bound built from ``βH^B - log ρS`` (``log_t_trick_bound``).

All four are available as dense matrix expressions and, for baths of
noninteracting bosons or spins, as closed forms acting on the system space
only. Exact composite dynamics, a numerical inequality laboratory and a
command line driver (``thermoqsl bounds|fig3|verify``) sit on top.
"""

__version__ = "0.1.0"

from .linalg import (DimensionError, LinalgError, NotHermitianError, NotPSDError,
                     anticommutator, commutator, embed, herm_eig, kron, matrix_sqrt_psd,
                     partial_trace)
from .states import (DensityMatrix, StateError, bloch_function, bloch_state,
                     hellinger_distance, skew_information, thermal_state)
from .specfun import QuadratureError, QuadratureResult, polygamma, quad_semiinf
from .bounds import (BoundCurve, DriveSpec, NumericalInconsistencyError, log_t_trick_bound,
                     mds_curve, relaxed_bound, skew_rate, t_trick_bound)
from .closedforms import (BosonicBathSpec, OhmicSpectralDensity, SpinBathSpec,
                          bch_conjugation_check, spectral_integrals, spin_boson_bounds,
                          wy_bosonic, wy_spin_bath)
from .propagator import (CentralSpinInstance, TrajectoryRecord, evolve_constant,
                         evolve_stepped, run_fig3)
