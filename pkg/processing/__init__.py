from .config import *
from .presets import *

__all__ = config.__all__ + presets.__all__
# processors not included in __all__ on purpose to separate/contain runtime code
