"""Exact computations around class groups of binary quadratic forms.

Subpackages cover form reduction and composition, exact q-series and the
trace formula, Kloosterman/Rademacher sums and singular-moduli traces,
attractor charge bookkeeping, elliptic-curve censuses over small prime
fields, and polar-term counting for weak Jacobi forms.  The `classforms`
command-line tool exposes all of it with reproducible JSON/CSV output.
"""

from .quadforms import Form, as_form

__all__ = ["Form", "as_form"]
__version__ = "0.1.0"
