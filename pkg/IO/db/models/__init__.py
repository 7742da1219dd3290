from .common import *

__all__ = common.__all__
