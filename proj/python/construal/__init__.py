"""Joint reward and construal inference on blocks-and-notches mazes."""

from ._construal import *  # noqa: F401,F403
from ._construal import __doc__  # noqa: F401
