"""Numerical laboratory for deformed spinor dynamics.

Subpackages cover the gamma-matrix algebra, the scalar deformation field
and its region partition, the modified Dirac dispersion, current matching
across interfaces, the weighted Gordon decomposition and moment fit, a
deformed-metric nonlinear sigma model on the lattice, Z2 cohomology of
finite covers, and a box-counting measure estimator.
"""

__version__ = "0.1.0"
