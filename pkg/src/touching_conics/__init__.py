"""Touching conics on a family of singular quartic surfaces.

The package validates the admissibility conditions on the surface parameters,
constructs and certifies the three families of real touching conics in the
invariant planes, evaluates the radius functions attached to the 24 small
resolutions of the branched double cover, locates their critical points
(where the normal bundle of a candidate fiber degenerates), and runs the
elimination that leaves exactly two admissible resolutions.
"""

__version__ = "0.1.0"
