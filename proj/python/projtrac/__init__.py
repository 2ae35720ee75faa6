"""Projective tractor checks for projectively compact Ricci-flat metrics."""

import json

from ._core import ProjtracError, RunConfig, expand, load_config, orbit, parse_config
from ._core import verify as _verify

__all__ = ["ProjtracError", "RunConfig", "expand", "load_config", "orbit", "parse_config", "verify"]


def verify(config):
    """Run the check battery and return the report as a dict."""
    if isinstance(config, str):
        config = parse_config(config)
    return json.loads(_verify(config))
