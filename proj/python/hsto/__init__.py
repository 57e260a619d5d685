"""Stochastic hydrostatic ocean simulator."""

from pathlib import Path

from ._core import HstoError, cli, echo_config, gronwall_suite, read_snapshot, verify
from ._core import run as _run

__all__ = ["HstoError", "cli", "echo_config", "gronwall_suite", "read_snapshot", "run", "verify"]


def run(config):
    """Run one trajectory from TOML text or a path to a TOML file."""
    if isinstance(config, Path) or (isinstance(config, str) and "\n" not in config and config.endswith(".toml")):
        config = Path(config).read_text()
    return _run(config)
