"""Centralized constants for tmtool.

Default limits, file names and report vocabulary live here.
"""


# Limits
class Limits:
    """Size caps for dense operator blocks and polynomial bases."""

    MAX_DIM = 12
    MAX_BASE_DIM = 6
    DEFAULT_TRIALS = 20
    DEFAULT_SEED = 0
    RANDOM_DIM = 4

    # Coboundary searches use 2 * (max input degree) + DEGREE_BOUND_SLACK
    DEGREE_BOUND_SLACK = 4


# File Paths
class FilePath:
    """File system paths."""

    ENV_FILE = ".env"
    STRUCTURES_DIR = "structures"
    EXPECTED_SUFFIX = ".expected.json"


# Exit Codes
class ExitCode:
    """Process exit codes of the command line."""

    OK = 0
    INPUT_ERROR = 1
    IDENTITY_FAILURE = 2


# Report Formats
class OutputFormat:
    """Report rendering formats."""

    JSON = "json"
    TEXT = "text"

    ALL = [JSON, TEXT]


# Commands
class Command:
    """Suite names accepted by the command line."""

    VERIFY = "verify"
    MODULAR = "modular"
    ELW = "elw"
    COHOMOLOGY = "cohomology"
    IDENTITIES = "identities"
    POLY = "poly"
    GAUGE = "gauge"
    ALL = "all"

    LIE_SUITES = [VERIFY, MODULAR, ELW, COHOMOLOGY, IDENTITIES]


# Structure File Keys
class StructureKey:
    """Top-level keys of structure files."""

    ALGEBRA = "algebra"
    BASIS = "basis"
    BRACKETS = "brackets"
    BILINEAR_FORM = "bilinear_form"
    PI = "pi"
    PSI = "psi"
    LAMBDA = "lambda"
    BASE_DIM = "base_dim"
    GAUGE = "B"
    TEST_FUNCTIONS = "test_functions"

    # Frame prefixes on R^n
    VECTOR_FRAME = "d"
    FORM_FRAME = "dx"


# Report Status
class ReportStatus:
    """Overall status of a suite report."""

    PASS = "pass"
    FAIL = "fail"


# Suite Tuning
class SuiteLimits:
    """Dimension above which the cubic operator-order scan is skipped."""

    ORDER_CHECK_MAX_DIM = 4
    RANDOM_COEFF = 2
