from .core import *
from .models import *

__all__ = core.__all__ + models.__all__
