from .db import *
from .files import *

__all__ = db.__all__ + files.__all__
