"""
Project-wide settings: directories, shipped data files, and a handful of defaults used across packages.

The output directory can be overridden with the FREESURFACE_OUT_DIR environment variable. No other setting is read
from the environment.
"""
import os
from pathlib import Path

__all__ = ['CORE_DIR', 'DATA_DIR', 'CONFIG_DIR', 'DEFAULT_CONFIG', 'JSON_PUBLIC_DIR', 'SCHEMA_FILE', 'DEFAULT_OUT_DIR',
           'OUT_DIR_ENV', 'LEDGER_FILE', 'DB_PROTO', 'CONTAINER_MAGIC', 'CSV_FLOAT_FORMAT', 'out_dir_from_env']

CORE_DIR = Path(__file__).resolve().parent

DATA_DIR = CORE_DIR / 'data'
CONFIG_DIR = DATA_DIR / 'configs'
DEFAULT_CONFIG = CONFIG_DIR / 'quadrupole.ini'

# directories containing JSON files for various purposes
JSON_PUBLIC_DIR = DATA_DIR / 'json/public'
SCHEMA_FILE = JSON_PUBLIC_DIR / 'csv_schema.json'

DEFAULT_OUT_DIR = CORE_DIR / 'out'
OUT_DIR_ENV = 'FREESURFACE_OUT_DIR'

LEDGER_FILE = 'runs.sqlite'
DB_PROTO = 'sqlite:///{}'

CONTAINER_MAGIC = '#freesurface-container v1'
CSV_FLOAT_FORMAT = '%.12e'

# files needed at runtime for the CLI to document and validate its outputs
_SHIPPED_FILES = [SCHEMA_FILE, DEFAULT_CONFIG]

for file in _SHIPPED_FILES:
    if not file.exists():
        print(f'WARNING: File {file} does not exist in project. Certain functions will not work.')


def out_dir_from_env(default=DEFAULT_OUT_DIR):
    """
    Output directory from the environment override, if set.

    :param Path default: directory to use when the variable is unset or empty
    :return Path:
    """
    value = os.environ.get(OUT_DIR_ENV)
    return Path(value) if value else Path(default)
