"""Convex functions on random normed modules over a finite atom space.

Random variables are atom-indexed vectors, so every "almost sure" statement
becomes an atomwise one.  The package provides the lattice of L0 scalars,
free random normed modules and their maps, a batched simplex solver, polyhedral
convex functions with exact conjugation, the affine-type order operators, and
a seeded property harness (:mod:`l0convex.verify`).
"""
from . import lp
from .convex import *  # noqa: F401,F403
from .convex import __all__ as _convex
from .errors import *  # noqa: F401,F403
from .errors import __all__ as _errors
from .lattice import *  # noqa: F401,F403
from .lattice import __all__ as _lattice
from .module import *  # noqa: F401,F403
from .module import __all__ as _module
from .operators import *  # noqa: F401,F403
from .operators import __all__ as _operators
from .serialize import from_json, to_json

__version__ = "0.1.0"

__all__ = ["lp", "to_json", "from_json", *_lattice, *_module, *_convex, *_operators, *_errors]
