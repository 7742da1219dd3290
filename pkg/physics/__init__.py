from .eos import *
from .expansion import *
from .energy import *

__all__ = eos.__all__ + expansion.__all__ + energy.__all__
