"""releu: a desk-scale laboratory for the free-boundary relativistic Euler
equations in Lagrangian coordinates on the slab T^2 x [0, 1].

The package evolves the fluid flow map with a method-of-lines integrator,
monitors the constraints the continuum system preserves (four-velocity
normalization, mass conservation, cofactor divergence), and verifies the
weighted norms, energies, and inequality checks that control the motion up to
the moving vacuum boundary.
"""

from .eos import Eos, p_zero_index
from .grid import Grid, distance_to_boundary

__all__ = [
    "Eos",
    "Grid",
    "distance_to_boundary",
    "p_zero_index",
]

__version__ = "0.1.0"
