from .data import *
from .runs import *
from .checks import *
from .reports import *

__all__ = data.__all__ + runs.__all__ + checks.__all__ + reports.__all__
