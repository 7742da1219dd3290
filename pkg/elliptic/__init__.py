from .solvers import *
from .monitors import *

__all__ = solvers.__all__ + monitors.__all__
