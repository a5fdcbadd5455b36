"""Size caps, overridable through environment variables.

Caps are configuration, not hard limits: every capped operation takes an
explicit ``cap=`` argument that defaults to the values here.

* ``TVCSP_ARITY_CAP``: maximum arity of a cost table (default 6; the table
  for arity 6 already has 4683 entries).
* ``TVCSP_SEARCH_CAP``: maximum number of variables the exact enumeration
  backends accept.  When unset, the brute-force optimizer caps at
  ``DEFAULT_ORACLE_CAP`` variables and the crisp satisfiability backend at
  ``DEFAULT_CRISP_CAP``; when set, both use the given value.

The improvement/preservation testers enumerate joint order types on ``2k``
or ``2k + 1`` positions and carry their own default cap of
``DEFAULT_JOINT_ARITY_CAP`` on the relation arity ``k``.
"""

import os

DEFAULT_ARITY_CAP = 6
DEFAULT_ORACLE_CAP = 8
DEFAULT_CRISP_CAP = 10
DEFAULT_JOINT_ARITY_CAP = 4

ARITY_CAP_NAME = "TVCSP_ARITY_CAP"
SEARCH_CAP_NAME = "TVCSP_SEARCH_CAP"


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from exc


def arity_cap() -> int:
    return _env_int(ARITY_CAP_NAME, DEFAULT_ARITY_CAP)


def oracle_cap() -> int:
    return _env_int(SEARCH_CAP_NAME, DEFAULT_ORACLE_CAP)


def crisp_cap() -> int:
    return _env_int(SEARCH_CAP_NAME, DEFAULT_CRISP_CAP)


def joint_arity_cap() -> int:
    return DEFAULT_JOINT_ARITY_CAP
