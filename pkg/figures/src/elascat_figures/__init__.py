"""Offline plotting scripts for the solver's CSV outputs.

Pure readers: nothing here recomputes physics, and the solver package is
never imported.  Deleting this package leaves every solver test runnable.
"""

__version__ = "0.1.0"
