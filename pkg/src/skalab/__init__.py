"""skalab: incidence combinatorics of finite projective planes.

Exact GF(p)/GF(p^2) arithmetic, PG(2,q) enumeration, induced-subgraph
density audits, Baer-subplane covering families, a balanced two-round
key-agreement protocol with an exhaustive secrecy audit, and a
piecewise-linear winding-number preimage search.
"""

__version__ = "0.1.0"
