"""RIS link simulator and detector benchmark."""

from ._deepris import *  # noqa: F401,F403
from ._deepris import __doc__  # noqa: F401
