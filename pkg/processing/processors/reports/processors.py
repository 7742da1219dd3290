from processing.runtime import Invocation
from plotting import plot_script_for
from reporting import find_tables, check_hashes

__all__ = ['report']


def report(logger, config, out_dir):
    """
    Write a plot script for every table in the output directory.

    All tables must carry the hash of the current configuration; a single mismatching table refuses the whole report.

    :param logger: active logger
    :param ExperimentConfig config:
    :param Path out_dir:
    :return list: produced files
    :raises HashMismatch: if a table was written under another configuration
    """
    logger.info('Running report()')
    with Invocation(logger, 'report', config, out_dir) as invocation:
        tables = find_tables(invocation.out_dir)
        if not tables:
            logger.warning(f'report: no tables found in {invocation.out_dir}')
        check_hashes(tables, invocation.config_hash)

        for table in tables:
            script = plot_script_for(table)
            if script is None:
                logger.debug(f'report: no plot script for {table.name}')
                continue
            invocation.add(script.write(), 'plot_script')
    return [path for path, _ in invocation.outputs]
