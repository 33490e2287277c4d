"""svdist: singular vertical distance on structured BV fields.

Models planar functions of bounded variation as a smooth grid part plus
jump walls plus Cantor channels, computes the singular vertical distance
pseudometric over lattice chains, decides minimal singularity, and checks
rigidity of equality cases for Steiner's perimeter inequality on concrete
scenarios.
"""

__version__ = "0.1.0"
