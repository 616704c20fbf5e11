"""Example scenarios shipped with the package."""
from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import List


def path(name: str) -> Path:
    """Filesystem path of a shipped scenario, e.g. ``path("figure1_correct")``."""
    if not name.endswith(".scenario"):
        name += ".scenario"
    return Path(str(resources.files(__name__).joinpath(name)))


def names() -> List[str]:
    return sorted(p.name[:-len(".scenario")] for p in resources.files(__name__).iterdir()
                  if p.name.endswith(".scenario"))
