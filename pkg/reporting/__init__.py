from .reports import *
from .json import *

__all__ = reports.__all__ + json.__all__
