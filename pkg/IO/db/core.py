from pathlib import Path

from sqlalchemy import create_engine
from sqlalchemy.orm import declarative_base, sessionmaker

from settings import DB_PROTO, LEDGER_FILE, DEFAULT_OUT_DIR

__all__ = ['Base', 'DBConnection']

# Sqlalchemy declarative base to be subclassed by all persisted types
Base = declarative_base()


class DBConnection:
    """
    DBConnection is a context manager for the run ledger kept in an output directory.

    Tables are created on entry if missing. Care should be taken that lazy queries are not made inside the context and
    then retrieved outside of the context.
    """
    def __init__(self, *, db_file=LEDGER_FILE, directory=DEFAULT_OUT_DIR, **kwargs):
        """
        :param str db_file: the filename of the ledger to be concatenated with its directory
        :param Path directory: the Path to the ledger, excepting its filename
        :param kwargs: collect any keyword arguments to pass to sqlalchemy's sessionmaker in __enter__
        """
        self._db = db_file
        self._dir = Path(directory)
        self.kwargs = kwargs

    @property
    def db_file(self):
        return self._db

    @property
    def directory(self):
        return self._dir

    def __enter__(self):
        self._dir.mkdir(parents=True, exist_ok=True)
        self._engine = create_engine(DB_PROTO.format(self._dir / self._db))
        Base.metadata.create_all(self._engine)
        self._session = sessionmaker(bind=self._engine, **self.kwargs)()
        return self._session

    def __exit__(self, exc_type, exc_val, exc_tb):
        self._session.close()
        self._engine.dispose()
