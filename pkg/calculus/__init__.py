from .fields import *
from .operators import *
from .norms import *
from .commutators import *

__all__ = fields.__all__ + operators.__all__ + norms.__all__ + commutators.__all__
