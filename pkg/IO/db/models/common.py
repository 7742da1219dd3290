from pathlib import Path
from datetime import datetime

from sqlalchemy import Column, Integer, String, DateTime, Float, ForeignKey
from sqlalchemy.orm import relationship

from IO.db.core import Base

__all__ = ['RunRecord', 'OutputFile']


class RunRecord(Base):
    """
    One invocation of a CLI subcommand, kept in the ledger of its output directory.

    The config hash ties every file the invocation produced to the effective configuration, so reports can refuse
    tables written under a different configuration.
    """
    __tablename__ = 'runs'

    id = Column(Integer, primary_key=True)

    command = Column(String)
    config_hash = Column(String)
    started = Column(DateTime)
    finished = Column(DateTime)
    wall_time = Column(Float)
    status = Column(String)
    out_dir = Column(String)

    outputs = relationship('OutputFile', back_populates='run')

    def __init__(self, command, config_hash, out_dir, started=None, status='running'):
        """
        :param str command: subcommand name, e.g. 'run'
        :param str config_hash: hex digest of the effective configuration
        :param Path out_dir: output directory of the invocation
        :param datetime started: start time, now when omitted
        :param str status: 'running', 'ok' or the name of the error that ended the invocation
        """
        self.command = command
        self.config_hash = config_hash
        self.out_dir = str(Path(out_dir).resolve())
        self.started = started if started is not None else datetime.now()
        self.status = status

    def finish(self, status='ok'):
        self.finished = datetime.now()
        self.wall_time = (self.finished - self.started).total_seconds()
        self.status = status

    def __repr__(self):
        return (f'{self.__class__.__name__}(command={repr(self.command)}, config_hash={repr(self.config_hash)}, '
                + f'status={repr(self.status)}, wall_time={self.wall_time})')


class OutputFile(Base):
    """A file produced by a run, with the kind of table or container it holds."""
    __tablename__ = 'outputs'

    id = Column(Integer, primary_key=True)

    _path = Column(String)
    kind = Column(String)
    config_hash = Column(String)
    run_id = Column(Integer, ForeignKey('runs.id'))

    run = relationship('RunRecord', back_populates='outputs')

    def __init__(self, path, kind, config_hash):
        """
        :param Path path: local file path, persisted as a string but set/returned as Path
        :param str kind: e.g. 'energy', 'sweep', 'container'
        :param str config_hash: hex digest written into the file
        """
        self.path = path
        self.kind = kind
        self.config_hash = config_hash

    @property
    def path(self):
        """Create a Path object from the string of the path kept in the database."""
        return Path(self._path)

    @path.setter
    def path(self, value):
        self._path = str(Path(value).resolve())

    @property
    def name(self):
        return self.path.name

    def __repr__(self):
        return f'{self.__class__.__name__}(path="{self.path}", kind={repr(self.kind)})'
