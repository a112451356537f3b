from ._gme import *  # noqa: F401,F403
from ._gme import __doc__  # noqa: F401
