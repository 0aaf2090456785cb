"""Explicit reciprocity for formal Drinfeld modules of stable height-1 reduction."""

from .config import RunConfig, build_module, parse_config, parse_config_text
from .drinfeld import DrinfeldModule, validate_module
from .errors import DrinfeldError
from .reciprocity import PairingValue, delta, pairing_rhs
from .suites import list_suites, run_suite, run_suites
from .version import __version__

__all__ = [
    "DrinfeldError",
    "DrinfeldModule",
    "PairingValue",
    "RunConfig",
    "__version__",
    "build_module",
    "delta",
    "list_suites",
    "pairing_rhs",
    "parse_config",
    "parse_config_text",
    "run_suite",
    "run_suites",
    "validate_module",
]
