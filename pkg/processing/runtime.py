"""
Pieces every subcommand needs: the reference geometry and equation of state of a configuration, the seed velocity,
and the Invocation context that records outputs in the run ledger and the manifest.
"""
from datetime import datetime
from pathlib import Path

from geometry.cache import GeometryCache
from geometry.disk import ReferenceDisk
from geometry.maps import LagrangianMap
from IO.db import DBConnection, RunRecord, OutputFile
from physics.eos import TabulatedFamily, default_family
from processing.config import config_hash
from processing.presets import seed_velocity
from reporting.json import write_manifest

__all__ = ['Invocation', 'reference_geometry', 'eos_for', 'seed_for', 'DATA_FILE']

DATA_FILE = 'compatible_data.fsc'


def reference_geometry(config):
    """
    Reference disk of the configured resolution and the geometry of the identity map on it.

    :param ExperimentConfig config:
    :return tuple: (ReferenceDisk, GeometryCache)
    """
    disk = ReferenceDisk(config.n_r, config.n_theta)
    return disk, GeometryCache(LagrangianMap.identity(disk), eta_threshold=config.eta_threshold)


def eos_for(config, kappa=None):
    """
    Equation of state of the configured family for one kappa.

    :param ExperimentConfig config:
    :param float kappa: defaults to config.kappa
    :return EosFamily:
    """
    kappa = config.kappa if kappa is None else kappa
    if config.family == 'custom':
        return TabulatedFamily.from_csv(kappa, Path(config.table))
    return default_family(kappa)


def seed_for(config, disk):
    return seed_velocity(disk, config.preset, omega=config.omega, coefficients=config.coefficients)


class Invocation:
    """
    Context manager around one subcommand.

    Files registered with `add` are recorded in the run ledger of the output directory together with the outcome of
    the subcommand, and listed in manifest.json. The ledger and manifest are written whether the body succeeds or
    raises; exceptions propagate.
    """
    def __init__(self, logger, command, config, out_dir):
        """
        :param logger: active logger
        :param str command: subcommand name
        :param ExperimentConfig config: effective configuration
        :param Path out_dir: output directory
        """
        self.logger = logger
        self.command = command
        self.config = config
        self.config_hash = config_hash(config)
        self.out_dir = Path(out_dir)
        self.outputs = []
        self.started = None

    def path(self, name):
        return self.out_dir / name

    def add(self, path, kind):
        """Register a produced file and return its path."""
        path = Path(path)
        self.outputs.append((path, kind))
        self.logger.info(f'{self.command}: wrote {path.name}')
        return path

    def __enter__(self):
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.started = datetime.now()
        self.logger.info(f'{self.command}: config hash {self.config_hash}')
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        status = 'ok' if exc_type is None else exc_type.__name__

        with DBConnection(directory=self.out_dir) as session:
            record = RunRecord(self.command, self.config_hash, self.out_dir, started=self.started)
            record.finish(status)
            record.outputs = [OutputFile(path, kind, self.config_hash) for path, kind in self.outputs]
            session.add(record)
            session.commit()

        manifest = write_manifest(self.out_dir / 'manifest.json', self.command, self.config_hash, self.started,
                                  [path for path, _ in self.outputs], status=status)
        self.logger.debug(f'{self.command}: ledger and {manifest.name} updated with status {status}')
        return False
