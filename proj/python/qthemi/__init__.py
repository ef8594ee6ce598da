"""Prescribed Q/T-curvature verification toolkit on the upper hemisphere.

Thin wrapper over the compiled core: expression DSL, intrinsic sphere
operators, product quadrature, conformal maps and flows, the variational
functionals, Kazdan-Warner residuals and nonexistence certificates.
"""

from ._qthemi import *  # noqa: F401,F403
from ._qthemi import __doc__ as _core_doc  # noqa: F401
