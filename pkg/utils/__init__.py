from .core import *
from .errors import *

__all__ = core.__all__ + errors.__all__
