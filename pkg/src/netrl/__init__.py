"""Networked-RL harness: wire protocol, impairment shim, environments,
policy training, and the deployment-gap evaluation layer."""

__version__ = "0.1.0"
