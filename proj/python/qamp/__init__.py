"""Statevector simulation of witness-preserving amplification procedures.

The heavy lifting lives in the compiled extension; this package re-exports it.
"""

try:
    from ._qamp import *  # noqa: F401,F403  (installed layout)
    from ._qamp import __doc__ as _doc
except ImportError:  # in-tree layout: extension built next to the package
    from _qamp import *  # noqa: F401,F403
    from _qamp import __doc__ as _doc

__doc__ = _doc
__version__ = "0.1.0"
