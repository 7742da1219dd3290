import numpy as np

from calculus.fields import Field
from construction import build_initial_data, verify_uniform_energy
from IO.files import FieldBlock, write_container, read_container
from processing.runtime import Invocation, reference_geometry, eos_for, seed_for, DATA_FILE
from reporting import trace_frame, write_table, build_summary, write_build_summary
from simulation.state import SimState
from utils.errors import SignConditionViolation, ConfigError, ContainerError

__all__ = ['build_data', 'write_compatible_data', 'load_initial_state']

_FIELDS = ('u0', 'p0', 'v0', 'phi')


def write_compatible_data(path, data, config_hash):
    """
    Container of the constructed data: u0, p0, v0, phi and h0..h5.

    :param Path path:
    :param CompatibleData data:
    :param str config_hash:
    :return Path:
    """
    blocks = [FieldBlock(name, getattr(data, name).rank, getattr(data, name).data) for name in _FIELDS]
    blocks += [FieldBlock(f'h{k}', 0, h.data) for k, h in enumerate(data.h)]
    return write_container(path, 'compatible-data', config_hash, blocks, kappa=repr(float(data.kappa)),
                           iterations=data.iterations)


def load_initial_state(path, config, disk):
    """
    SimState at t = 0 from a compatible-data container: v = v0, h = h0, D_t h = h1.

    :param Path path: container written by build-data
    :param ExperimentConfig config: must match the container in kappa and resolution
    :param ReferenceDisk disk:
    :return SimState:
    :raises ConfigError: when the container was built for another kappa or grid
    :raises ContainerError: when a required block is missing
    """
    container = read_container(path)
    if container.kind != 'compatible-data':
        msg = f'{path} holds {container.kind!r}, not compatible data'
        raise ContainerError(msg)

    kappa = float(container.attributes.get('kappa', 'nan'))
    if not np.isclose(kappa, config.kappa, rtol=1e-12) and not (np.isinf(kappa) and np.isinf(config.kappa)):
        msg = f'Data in {path.name} was built for kappa={kappa:g}; run build-data again'
        raise ConfigError(msg, section='eos', key='kappa')

    try:
        v0, h0, h1 = container['v0'].data, container['h0'].data, container['h1'].data
    except KeyError as e:
        msg = f'{path.name} has no block {e.args[0]}'
        raise ContainerError(msg)
    if h0.shape != disk.shape:
        msg = f'Data in {path.name} is on a {h0.shape[0]}x{h0.shape[1]} grid; run build-data again'
        raise ConfigError(msg, section='grid')

    state = SimState.initial(disk, eos_for(config), Field(v0, 1), Field(h0), Field(h1))
    return state.replace(eta_threshold=config.eta_threshold)


def build_data(logger, config, out_dir):
    """
    Construct compatible initial data and write the container, the iteration trace and the build summary.

    The summary is written before the Taylor sign condition is enforced, so a rejected seed still leaves a record of
    its eps.

    :param logger: active logger
    :param ExperimentConfig config:
    :param Path out_dir:
    :return list: produced files
    :raises SignConditionViolation: if eps(h0) < eps_min for data with a nonzero enthalpy
    """
    logger.info('Running build_data()')
    disk, cache = reference_geometry(config)
    u0 = seed_for(config, disk)

    with Invocation(logger, 'build-data', config, out_dir) as run:
        data, trace = build_initial_data(u0, config.kappa, cache, eos=eos_for(config), tol=config.builder,
                                         max_iter=config.max_iter, sobolev_order=config.sobolev_order,
                                         elliptic_tolerance=config.elliptic, neumann_phi=config.neumann_phi,
                                         logger=logger)

        run.add(write_compatible_data(run.path(DATA_FILE), data, run.config_hash), 'container')
        run.add(write_table(trace_frame(trace), run.path('iteration_trace.csv'), run.config_hash), 'iteration_trace')

        eps = data.residuals['eps']
        at_rest = not np.any(data.h[0].data)
        sign_ok = eps >= config.eps_min or at_rest
        if at_rest:
            logger.warning('Constructed enthalpy vanishes identically; reporting the order-0 energy only')
        order = config.order if sign_ok and not at_rest else 0

        report = verify_uniform_energy(data, order, cache, eps_min=config.eps_min, logger=logger)
        summary = build_summary(data, trace, report, config.eps_min)
        if at_rest:
            summary['sign_condition'] = 'at-rest'
        run.add(write_build_summary(run.path('build_summary.json'), summary, run.config_hash), 'summary')

        logger.info(f'build-data: eps={eps:.6g}, E*={report.E_star:.6e}, {data.iterations} iterations')
        if not sign_ok:
            msg = f'Constructed h0 violates the Taylor sign condition: eps = {eps:.3e} < {config.eps_min:.1e}'
            logger.error(msg)
            raise SignConditionViolation(msg, eps=eps)

    return [path for path, _ in run.outputs]
