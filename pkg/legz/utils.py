from __future__ import annotations

import importlib.metadata
import os
from datetime import datetime, timezone

DEFAULT_FACTOR_CEILING = 10**8
"""Default trial-division ceiling for factoring norms."""


def get_factor_ceiling() -> int:
    """
    Trial-division ceiling for factoring, read from the LEGZ_FACTOR_CEILING
    environment variable on every call so that tests and the CLI can change it.
    """
    value = os.environ.get("LEGZ_FACTOR_CEILING")
    if value is None or not value.strip():
        return DEFAULT_FACTOR_CEILING
    try:
        ceiling = int(value)
    except ValueError:
        raise ValueError(
            f"LEGZ_FACTOR_CEILING must be a positive integer, not {value!r}"
        ) from None
    if ceiling < 2:
        raise ValueError(f"LEGZ_FACTOR_CEILING must be at least 2, not {ceiling}")
    return ceiling


def get_legz_version() -> str | None:
    # https://github.com/pypa/setuptools_scm/#retrieving-package-version-at-runtime
    try:
        return importlib.metadata.version("legz")
    except importlib.metadata.PackageNotFoundError:
        return None


def get_datetime_now() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()
