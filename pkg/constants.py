"""
Numerical constants, tolerances and defaults for the cavity spectrum solver.
All physics is in natural units (hbar = c = epsilon_0 = 1).
"""

# ============================================================================
# DEFAULT PHYSICAL CONFIGURATION
# ============================================================================
DEFAULT_MASS = 1.0              # particle mass m
DEFAULT_MU = 1.0                # dipole moment magnitude
DEFAULT_RHO = 1.0               # volume charge density of the shell
DEFAULT_R_A = 1.0               # cavity radius (impenetrable wall)
DEFAULT_R_B = 4.0               # outer radius of the charged cylinder
                                # -> omega_AC = 1, y_a = 0.5

PHASE_CONVENTIONS = ("literal", "unsigned")
DEFAULT_PHASE_CONVENTION = "literal"

# ============================================================================
# SPECIAL FUNCTIONS
# ============================================================================
EPS = 2.220446049250313e-16     # double precision unit roundoff (x2)
EULER_GAMMA = 0.5772156649015329

# Lanczos approximation (g = 6.0246800407767295837, 13 terms), as used by
# the Boost / cephes "lanczos13m53" rational form.
LANCZOS_G = 6.024680040776729583740234375
LANCZOS_NUM = (
    23531376880.41075968857200767445163675473,
    42919803642.64909876895789904700198885093,
    35711959237.35566804944018545154716670596,
    17921034426.03720969991975575445893111267,
    6039542586.35202800506429164430729792107,
    1439720407.311721673663223072794912393972,
    248874557.8620541565114603864132294232163,
    31426415.58540019438061423162831820536287,
    2876370.628935372441225409051620849613599,
    186056.2653952234950402949897160456992822,
    8071.672002365816210638002902272250613822,
    210.8242777515793458725097339207133627117,
    2.506628274631000270164908177133837338626,
)
LANCZOS_DEN = (
    0.0, 39916800.0, 120543840.0, 150917976.0, 105258076.0, 45995730.0,
    13339535.0, 2637558.0, 357423.0, 32670.0, 1925.0, 66.0, 1.0,
)

MAX_SERIES_TERMS = 5000         # hard cap on any power series
KUMMER_OVERFLOW_GUARD = 700.0   # |x| beyond this overflows e^x
KUMMER_SCALED_ABOVE = 50.0      # M also reported as e^{-x} M above this x
INTEGER_B_TOL = 1e-8            # |b - round(b)| below this -> logarithmic case
ASYMPTOTIC_MIN_X = 10.0         # Poincare expansion is only tried above this x
DIRECT_AX_LIMIT = 8.0           # convergent U forms are tried below this a*x (below this x for a < 1)
MILLER_DECADES = 37.0           # e^-37 ~ 1e-16 dominance at the top of Miller
MILLER_SUM_MIN_X = 0.5          # sum-rule Miller for U needs ~ 400 / x steps
MILLER_SUM_DEPTH = 20.0         # sqrt(N) = sqrt(a + 1) + this / sqrt(x): tail below e^-40
ACCEPT_REL_ERR = 1e-13          # first M/U path at or below this relative error wins
DA_STEP_MIN = 1e-6              # dU/da stencil step floor
DA_STEP_REL = 1e-8              # dU/da stencil step relative to |a|

# ============================================================================
# EXACT SOLVER
# ============================================================================
SCAN_STEP = 0.05                # scan step in a-bar (unit spacing / 20)
BISECTION_REL_WIDTH = 1e-12     # final bracket width relative to the bracket span
BISECTION_MAX_ITER = 200
MAX_SCAN_REFINEMENTS = 3        # step halvings when the oracle count disagrees
RESIDUAL_FLAG_FRACTION = 0.1    # flag U evaluations with err > 10% of |U|

PROFILE_SAMPLES = 2000          # default wavefunction samples
VALIDITY_SAMPLES = 400          # samples behind the validity fraction of table rows
PROFILE_DECAY_LENGTHS = 12.0    # r_max = r_a + this / sqrt(m omega)
TAIL_WARN_FRACTION = 1e-6       # warn when the Gaussian tail holds this much norm

# ============================================================================
# FINITE-DIFFERENCE ORACLE
# ============================================================================
ORACLE_NODES = 20000            # acceptance-grade grid
ORACLE_MIN_NODES = 1000
ORACLE_DECAY_LENGTHS = 12.0     # r_max = r_a + this / sqrt(m omega)
ORACLE_MIN_DECAY_LENGTHS = 8.0  # GridSpec invariant
ORACLE_ABS_TOL = 1e-10          # eigenvalue tolerance in units of omega_AC
TRUNCATION_MASS = 1e-8          # outer-10% eigenvector mass that triggers a warning
GOLDEN_NODES = 80000            # resolution of the stored golden fixture

# ============================================================================
# CURRENTS
# ============================================================================
CURRENT_PHASE_STEP = 1e-6       # relative central-difference step in Phi_MAC

# ============================================================================
# CLI / OUTPUT
# ============================================================================
OUTPUT_DIGITS = 17              # round-trip exact for doubles
DEFAULT_ELL_MIN = -5
DEFAULT_ELL_MAX = 5
DEFAULT_EMAX = 12.0             # in units of omega_AC
METHODS = ("exact", "case1", "case2", "oracle")
SWEEP_PARAMETERS = ("rho", "r_a", "mu", "phi_override")
OUTPUT_FORMATS = ("csv", "json")
VERSION = "0.3.0"
