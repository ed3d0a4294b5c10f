"""Length-control toolkit for reasoning-model traces.

Stopping policies over a seeded token simulator, length-penalized rewards with
GRPO advantages, and trace analytics. The heavy lifting lives in the C++
extension ``_lenctl``.
"""

from ._lenctl import *  # noqa: F401,F403
from ._lenctl import __doc__ as _ext_doc  # noqa: F401

__version__ = "0.1.0"
