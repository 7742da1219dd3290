import logging
from pathlib import Path

__all__ = ['configure_logger', 'get_logger', 'make_class_iterable_on_attr', 'LOGGER_NAME']

LOGGER_NAME = 'freesurface'


def configure_logger(rundir, name):
    """
    Create the run-specific logger. DEBUG and up is saved to the log, INFO and up appears in the console.

    The logger is parented to the project logger so library code logging through get_logger() ends up in the same file.

    :param Path rundir: Path to create the logfile in
    :param str name: name for logfile
    :return Logger: logger object
    """
    Path(rundir).mkdir(parents=True, exist_ok=True)
    logfile = Path(rundir) / f'{name}.log'
    logger = logging.getLogger(f'{LOGGER_NAME}.{name}')
    logger.setLevel(logging.DEBUG)
    fh = logging.FileHandler(logfile)
    fh.setLevel(logging.DEBUG)

    ch = logging.StreamHandler()
    ch.setLevel(logging.INFO)

    formatter = logging.Formatter('%(asctime)s -%(levelname)s- %(message)s')

    [H.setFormatter(formatter) for H in [ch, fh]]
    if not len(logger.handlers):
        _ = [logger.addHandler(H) for H in [ch, fh]]

    logger.propagate = False
    return logger


def get_logger(logger=None):
    """
    Return the given logger, or the project-wide logger when none was passed.

    :param Logger | None logger: a configured logger, usually the one created by configure_logger
    :return Logger:
    """
    return logger if logger is not None else logging.getLogger(LOGGER_NAME)


def make_class_iterable_on_attr(attr):
    """
    Class decorator for making a class iterable by delegating iteration to its attribute 'attr'.

    :param str attr: attribute to delegate iteration of the class to
    :return: the wrapped class, with added __iter__ method
    """
    def class_wrap(cls):
        def delegated_iter(self):
            return iter(getattr(self, attr))

        cls.__iter__ = delegated_iter
        return cls

    return class_wrap
