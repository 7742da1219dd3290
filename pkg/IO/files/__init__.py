from .handling import *
from .containers import *

__all__ = handling.__all__ + containers.__all__
