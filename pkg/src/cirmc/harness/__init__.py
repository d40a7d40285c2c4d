"""Experiment harness: configs, flat records, runners, figures."""

from .config import (
    CONFIG_CLASSES,
    DP_TABLE,
    LDA_TABLE,
    SCIR_STEPSIZE_GRID,
    SGRLD_STEPSIZE_GRID,
    DpmixConfig,
    GenDataConfig,
    LdaConfig,
    SyntheticConfig,
    TheoryConfig,
    load_config,
    parse_config_text,
)
from .records import RECORD_COLUMNS, RunRecord, read_records_csv, write_ks_csv, write_records_csv

__all__ = [
    "CONFIG_CLASSES",
    "DP_TABLE",
    "LDA_TABLE",
    "SCIR_STEPSIZE_GRID",
    "SGRLD_STEPSIZE_GRID",
    "DpmixConfig",
    "GenDataConfig",
    "LdaConfig",
    "SyntheticConfig",
    "TheoryConfig",
    "load_config",
    "parse_config_text",
    "RECORD_COLUMNS",
    "RunRecord",
    "read_records_csv",
    "write_ks_csv",
    "write_records_csv",
]
