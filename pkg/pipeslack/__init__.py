"""
pipeslack package initialization.

The current main purpose of this is to provide package-level globals
that can be imported by submodules.
"""

# Set version
from pipeslack._version import __version__

# Import and instantiate the logger
from pipeslack import pipemsgs
msgs = pipemsgs.Messages()
