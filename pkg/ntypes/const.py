"""Constants for the ntypes kernel."""

from __future__ import annotations

from typing import Final

LOGGER_NAME: Final = "ntypes"

# Report format
REPORT_SCHEMA: Final = "ntype-report/1"

# Budgets
DEFAULT_DIM_BOUND: Final = 6
DEFAULT_SEARCH_NODES: Final = 200_000
DEFAULT_COSET_LIMIT: Final = 4000
DEFAULT_HOM_ORDER: Final = 6
DEFAULT_WORD_LENGTH: Final = 2
ISOMORPHISM_ORDER_LIMIT: Final = 120
HOM_COUNT_MAX_GENERATORS: Final = 4

# Exit codes
EXIT_CERTIFIED: Final = 0
EXIT_REFUTED: Final = 1
EXIT_UNKNOWN: Final = 2
EXIT_INPUT_ERROR: Final = 3

# Verdict labels
VERDICT_CERTIFIED: Final = "certified"
VERDICT_REFUTED: Final = "refuted"
VERDICT_UNKNOWN: Final = "unknown"

# Sectionwise functor tags
TAG_COSK: Final = "cosk"
TAG_POSTNIKOV: Final = "postnikov"
TAG_EX: Final = "ex"
TAG_LOOP_GROUPOID: Final = "loop_groupoid"
TAG_WBAR: Final = "wbar"
TAG_DIAG_NERVE: Final = "diag_nerve"
TAG_POSTNIKOV_GPD: Final = "postnikov_gpd"
SSET_TAGS: Final = (TAG_COSK, TAG_POSTNIKOV, TAG_EX)

# Group comparison labels
COMPARE_ISOMORPHIC: Final = "isomorphic"
COMPARE_NOT_ISOMORPHIC: Final = "not_isomorphic"

# Outcome label of constructions
RESULT_OK: Final = "ok"

# Default level range for command line runs
DEFAULT_MAX_DIM: Final = 3
