"""
Numerical defaults for the point-interaction wave simulator.
"""

# Determinism
RANDOM_SEED = 42

# Radial grid (natural units, wave speed 1)
R_MAX = 40.0
N_R = 2000
MIN_ORACLE_NODES = 16

# Spectral basis
ROOT_XTOL = 1e-14            # bracketed solve for quantized k-nodes
ZERO_EIGENVALUE_TOL = 1e-14  # oracle modes treated as exactly zero

# Tolerances
POLE_TOLERANCE = 1e-12           # |alpha + sqrt(lambda)/(4 pi)| below this is a pole
ORACLE_RESOLVENT_GAP = 1e-8      # distance to nearest oracle eigenvalue
DOMAIN_TOLERANCE = 1e-2          # |alpha Q - phi_reg(0)| for generator inputs
CHARGE_TOLERANCE = 1e-8          # charge treated as zero by the free flow
RUNAWAY_TOLERANCE = 1e-8         # relative bound amplitude allowed in non-runaway maps
LIGHTCONE_THRESHOLD = 1e-8       # relative amplitude defining a state's support
BUMP_SUPPORT_WIDTHS = 6.0        # bump support radius in units of its width

# Core approximation
CORE_TAPER_CELLS = 2             # minimum cosine taper width in grid cells
CORE_TAPER_FRACTION = 1.0 / 16.0  # taper width as a fraction of r_max
CORE_LEVELS = 4
CORE_ROUNDING_FLOOR = 1e-12       # relative distances below this count as converged

# Scattering
MOLLER_SIGN = 1                  # m_plus(k) = exp(-1j * MOLLER_SIGN * delta(k))
MOLLER_SCHEDULE = (5.0, 10.0, 20.0, 40.0)
INTERTWINING_TIME = 1.0

# Acceptance tolerances for `pointwave verify`
CHECK_TOLERANCES = {
    'eigenvalue': 1e-3,
    'eigenvalue_rate': 0.3,          # allowed deviation of the O(h^2) exponent
    'runaway_rate_spectral': 1e-6,
    'runaway_rate_oracle': 1e-3,
    'energy_drift': 1e-8,
    'oracle_equivalence': 1e-4,
    'group_law': 1e-8,
    'complex_structure': 1e-8,
    'symplectic': 1e-8,
    'zero_mode': 1e-10,
    'krein_rank': 1e-8,
    'scattering_exact': 1e-6,
    'scattering_intertwining': 1e-3,  # the two discrete spectra differ, so the box flows only nearly commute
    'scattering_limit': 1e-3,
    'core_approximation': 10.0,      # final distance over the oracle_equivalence baseline
    'phase_shift': 1e-3,
}

VERIFY_SUITES = (
    'eigenvalue', 'runaway_rate', 'energy_drift', 'oracle_equivalence', 'group_law',
    'complex_structure', 'symplectic', 'zero_mode', 'krein_rank', 'phase_shift',
    'scattering', 'core_approximation',
)
KREIN_LAMBDAS = (1.0, 4.0)    # resolvent points for the rank-one check
RANDOM_STATE_COUNT = 20         # seeded states for the group and complex-structure sweeps

# Parallelism
THREADS_ENV_VAR = 'POINTWAVE_THREADS'
DEFAULT_THREADS = 1

# Output
OUTPUT_DIRECTORY = 'output'
OUTPUT_FORMATS = ('csv', 'json')
SERIES_FILENAME = 'series.csv'
REPORT_FILENAME = 'report.json'
MOLLER_FILENAME = 'moller.csv'
SPECTRUM_FILENAME = 'spectrum.csv'
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
