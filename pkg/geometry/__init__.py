from .disk import *
from .maps import *
from .cache import *

__all__ = disk.__all__ + maps.__all__ + cache.__all__
