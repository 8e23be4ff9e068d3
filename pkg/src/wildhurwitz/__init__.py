"""Exact checks for wild Hurwitz data of degree-p covers.

Submodules: ``valuation_ring`` (truncated DVR arithmetic), ``power_series``
(truncated series and p^r-earnestness), ``annulus`` (covers of formal
annuli), ``hurwitz_graph``, ``cover_skeleton``, ``deformation`` and ``cli``.
"""

from .errors import WildHurwitzError
from .valuation_ring import INF, Mode, RingElement, RingSpec

__all__ = ["INF", "Mode", "RingElement", "RingSpec", "WildHurwitzError"]
__version__ = "0.1.0"
