from .processors import *

__all__ = processors.__all__
