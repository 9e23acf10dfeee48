"""Size guards. Environment variables override the defaults."""

import os

ROW_LIMIT_ENV = "FORMALRINGS_MAX_ROW"
FLATTEN_LIMIT_ENV = "FORMALRINGS_MAX_FLATTEN"
ISO_LIMIT_ENV = "FORMALRINGS_MAX_ISO"

DEFAULT_ROW_LIMIT = 4096
DEFAULT_FLATTEN_LIMIT = 4096
DEFAULT_ISO_LIMIT = 4096
# socle oracle cross-check inside algebra-core
SOCLE_ORACLE_LIMIT = 64


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    return int(raw)


def row_limit() -> int:
    return _env_int(ROW_LIMIT_ENV, DEFAULT_ROW_LIMIT)


def flatten_limit() -> int:
    return _env_int(FLATTEN_LIMIT_ENV, DEFAULT_FLATTEN_LIMIT)


def iso_limit() -> int:
    return _env_int(ISO_LIMIT_ENV, DEFAULT_ISO_LIMIT)
