"""Input parameter model generation and analysis."""

import json

from . import _core
from ._core import *  # noqa: F401,F403


def analyze(model, strength=2, seed=0, ratios=True):
    """Structural profile and validity ratios of `model` as a dict."""
    return json.loads(_core.analyze_json(model, strength=strength, seed=seed, ratios=ratios))


def load_ctwedge(path):
    with open(path, encoding="utf-8") as f:
        return _core.parse_ctwedge(f.read())


__all__ = [name for name in dir(_core) if not name.startswith("_")] + ["analyze", "load_ctwedge"]
