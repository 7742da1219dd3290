from .builder import *

__all__ = builder.__all__
