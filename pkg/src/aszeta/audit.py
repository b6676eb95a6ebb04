"""Access to the pinned audit constants shipped with the package."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources


@lru_cache(maxsize=1)
def audit_constants() -> dict:
    """The version-controlled tolerance bands; see fixtures/ for values."""
    ref = resources.files("aszeta") / "fixtures" / "audit_constants.json"
    return json.loads(ref.read_text())
