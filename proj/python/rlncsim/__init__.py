from ._rlncsim import *  # noqa: F401,F403
from ._rlncsim import __doc__  # noqa: F401
