from ._qinduce import *  # noqa: F401,F403
