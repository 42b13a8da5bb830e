"""Resource caps for exhaustive enumerations.

The global cap can be overridden with the ``SHIFTLAB_CAP`` environment
variable or, for a single CLI run, with ``--cap-override``.
"""

import os

from .errors import CapExceeded

DEFAULT_TABLE_CAP = 2**24
SUBGROUP_ORDER_CAP = 128
SEPARATION_SEARCH_CAP = 2**20

_override = None


def table_cap() -> int:
    if _override is not None:
        return _override
    env = os.environ.get("SHIFTLAB_CAP")
    if env:
        return int(env)
    return DEFAULT_TABLE_CAP


def set_override(value):
    """Set (or clear, with ``None``) a process-wide cap override."""
    global _override
    _override = None if value is None else int(value)


def check(size: int, what: str, cap: int | None = None) -> None:
    limit = table_cap() if cap is None else cap
    if size > limit:
        raise CapExceeded(f"{what}: size {size} exceeds cap {limit}")
