from .state import *
from .integrators import *
from .runs import *

__all__ = state.__all__ + integrators.__all__ + runs.__all__
# experiments not imported here on purpose; it depends on construction, which depends on this package
