"""Segmented-chain sensor deployment planner and protocol simulator."""

from ._core import (
    AccountingError,
    Config,
    ConfigError,
    DomainError,
    coverage_fraction,
    density_for_coverage,
    load_config,
    parse_config,
    plan,
    plan_csv,
    simulate,
    transfer_schedule,
    tx_packet_energy,
)

__all__ = [
    "AccountingError",
    "Config",
    "ConfigError",
    "DomainError",
    "coverage_fraction",
    "density_for_coverage",
    "load_config",
    "parse_config",
    "plan",
    "plan_csv",
    "simulate",
    "transfer_schedule",
    "tx_packet_energy",
]
