from .plots import *

__all__ = plots.__all__
