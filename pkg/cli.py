"""
Run the experiments of the free-surface lab from the command line.

Every subcommand reads an INI configuration, applies the command-line overrides and writes its outputs to the output
directory. Exit codes: 0 success, 1 configuration error, 2 numerical error, 3 input/output error.
"""
import argparse
import sys
from datetime import datetime

from settings import DEFAULT_CONFIG
from utils import configure_logger
from utils.errors import ConfigError, exit_code_for
from processing import load_config, apply_overrides, resolve_out_dir
from processing.processors import build_data, run, sweep, check, report

__all__ = ['main', 'parser']

COMMANDS = {
    'build-data': build_data,
    'run': run,
    'sweep': sweep,
    'check': check,
    'report': report,
}


def _effective_config(ergs):
    """Configuration file plus overrides; --out is applied by resolve_out_dir, not stored in the config."""
    config = load_config(ergs.config)
    return apply_overrides(config, kappa=ergs.kappa, order=ergs.order, resolution=ergs.resolution)


def execute(ergs):
    """
    Load the configuration, create the invocation's logger and call the subcommand's processor.

    :param ergs: arguments produced by parser.parse_args()
    :return int: exit code
    """
    try:
        config = _effective_config(ergs)
    except ConfigError as e:
        print(f'Configuration error: {e}', file=sys.stderr)
        return e.exit_code

    out_dir = resolve_out_dir(config, ergs.out)
    logger = configure_logger(out_dir, datetime.now().strftime('%Y_%m_%d_%H%M_') + ergs.command.replace('-', '_'))

    try:
        COMMANDS[ergs.command](logger, config, out_dir)
    except Exception as e:
        code = exit_code_for(e)
        logger.error(f'{ergs.command} failed with {e.__class__.__name__}: {e}')
        if code == 2 and not hasattr(e, 'exit_code'):
            logger.exception('Unexpected error')
        return code
    return 0


parser = argparse.ArgumentParser(
    prog='freesurface',
    description='Build compatible data, run and compare free-surface simulations, and check the estimates they rely on.'
)

subparsers = parser.add_subparsers(required=True, dest='command',
                                   title='Mandatory Subcommands',
                                   help='Build initial data (build-data), integrate it (run), compare across kappa '
                                        + '(sweep), run the monitors (check) or emit plot scripts (report).')

_descriptions = {
    'build-data': 'Construct compatible initial data and write the container, iteration trace and build summary.',
    'run': 'Integrate one trajectory; compressible runs need the data written by build-data.',
    'sweep': 'Compare compressible runs over kappa_list with the incompressible run of the same seed.',
    'check': 'Run the Poincare, projection, Hodge, trace, commutator and equation-of-state monitors.',
    'report': 'Write a plot script for every table in the output directory; refuses tables of other configurations.',
}

for _name, _description in _descriptions.items():
    _sub = subparsers.add_parser(_name, description=_description)
    _sub.add_argument('-c', '--config', default=DEFAULT_CONFIG, dest='config',
                      help=f'INI configuration file; defaults to {DEFAULT_CONFIG.name}.')
    _sub.add_argument('-o', '--out', dest='out',
                      help='Output directory; overrides FREESURFACE_OUT_DIR and the configuration.')
    _sub.add_argument('-k', '--kappa', dest='kappa',
                      help='Comma-separated kappa values; a single value also sets kappa.')
    _sub.add_argument('-r', '--order', type=int, dest='order', help='Energy order r, 0 to 4.')
    _sub.add_argument('--resolution', dest='resolution', help='Grid as NRxNT, e.g. 33x64.')

    # if a subparser is used, execute is set as its func, such that args.func(args) can be called
    _sub.set_defaults(func=execute)


def main(argv=None):
    args = parser.parse_args(argv)
    return args.func(args)
