import pandas as pd

from IO.files import FieldBlock, write_container
from processing.processors.data import load_initial_state
from processing.runtime import Invocation, reference_geometry, eos_for, seed_for, DATA_FILE
from reporting import energy_frame, diagnostics_frame, write_table
from simulation import run_compressible, run_incompressible
from simulation.experiments import kappa_sweep, curl_transport_check, uniform_energy_table
from utils.errors import FreeSurfaceError

__all__ = ['run', 'sweep', 'write_snapshots']


def write_snapshots(path, result, config_hash):
    """Node positions, velocity and enthalpy of every sampled state, tagged with their times."""
    blocks = []
    for k, state in enumerate(result.snapshots):
        blocks += [FieldBlock(f'x{k}', 1, state.map.positions, state.t), FieldBlock(f'v{k}', 1, state.v.data, state.t),
                   FieldBlock(f'h{k}', 0, state.h.data, state.t)]
    return write_container(path, 'snapshots', config_hash, blocks, mode=result.mode, samples=len(result.snapshots))


def run(logger, config, out_dir):
    """
    Integrate one trajectory and write its energy table, diagnostics and snapshots.

    Compressible runs start from the data written by build-data; incompressible runs start from the seed.

    :param logger: active logger
    :param ExperimentConfig config:
    :param Path out_dir:
    :return list: produced files
    """
    logger.info('Running run()')
    disk, _ = reference_geometry(config)

    with Invocation(logger, 'run', config, out_dir) as invocation:
        if config.incompressible:
            result = run_incompressible(seed_for(config, disk), config.T, disk, dt=config.time_step, cfl=config.cfl,
                                        sample_every=config.sample_every, projection_every=config.projection_every,
                                        tolerance=config.elliptic, filter_strength=config.filter_strength,
                                        logger=logger)
        else:
            state = load_initial_state(invocation.path(DATA_FILE), config, disk)
            result = run_compressible(state, config.T, dt=config.time_step, cfl=config.cfl,
                                      sample_every=config.sample_every, order=config.order, eps_min=config.eps_min,
                                      filter_strength=config.filter_strength, logger=logger)

        hash_ = invocation.config_hash
        invocation.add(write_table(energy_frame(result), invocation.path('energy.csv'), hash_), 'energy')
        invocation.add(write_table(diagnostics_frame(result), invocation.path('diagnostics.csv'), hash_),
                       'diagnostics')
        invocation.add(write_snapshots(invocation.path('snapshots.fsc'), result, hash_), 'container')

        if len(result.snapshots) >= 3:
            curl = pd.DataFrame(curl_transport_check(result), columns=['t', 'residual', 'curl', 'rhs'])
            invocation.add(write_table(curl, invocation.path('curl_transport.csv'), hash_), 'curl_transport')

        if not result.flags.get('sign_ok', True):
            logger.warning('run finished with the Taylor sign condition violated at t = 0')
        logger.info(f'run: {result.stats["steps"]} steps of dt={result.stats["dt"]:.3e} '
                    f'in {result.stats["wall_time"]:.1f}s')

    return [path for path, _ in invocation.outputs]


def sweep(logger, config, out_dir):
    """
    Incompressible-limit sweep over config.kappa_list, with the uniform-in-kappa energy table of the constructed data.

    :param logger: active logger
    :param ExperimentConfig config:
    :param Path out_dir:
    :return list: produced files
    """
    logger.info('Running sweep()')
    disk, cache = reference_geometry(config)
    u0 = seed_for(config, disk)

    with Invocation(logger, 'sweep', config, out_dir) as invocation:
        table = kappa_sweep(u0, config.kappa_list, config.T, config.order, disk, cfl=config.cfl,
                            sample_every=config.sample_every, builder_tolerance=config.builder,
                            max_iter=config.max_iter, sobolev_order=config.sobolev_order,
                            elliptic_tolerance=config.elliptic, neumann_phi=config.neumann_phi,
                            eps_min=config.eps_min, projection_every=config.projection_every,
                            filter_strength=config.filter_strength, workers=config.workers, logger=logger)
        invocation.add(write_table(table, invocation.path('sweep.csv'), invocation.config_hash), 'sweep')

        finite = [k for k in config.kappa_list if k != float('inf')]
        try:
            uniform = uniform_energy_table(u0, finite, config.order, cache, tol=config.builder,
                                           max_iter=config.max_iter, eos_factory=lambda k: eos_for(config, k),
                                           logger=logger)
        except FreeSurfaceError as e:
            logger.warning(f'uniform energy table skipped: {e.__class__.__name__}: {e}')
        else:
            invocation.add(write_table(uniform, invocation.path('uniform_energy.csv'), invocation.config_hash),
                           'uniform_energy')

    return [path for path, _ in invocation.outputs]
