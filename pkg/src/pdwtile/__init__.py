"""Spherical tilings by congruent quadrangles over quadrangulations of the sphere.

Submodules: ``maps`` (planar maps, canonical codes), ``quadgen`` (generation),
``chart`` and ``linsys`` (decorations and exact linear systems),
``feasibility`` (placements, assignments, lemma filters), ``patterns``
(forbidden configurations), ``pipeline`` (classification), ``geom``
(numerical realization) and ``render``.
"""

__version__ = "0.1.0"

from .chart import Chart, build_A, build_P, build_Q  # noqa: E402
from .maps import PlanarMap, make_pdw  # noqa: E402

__all__ = ["Chart", "PlanarMap", "build_A", "build_P", "build_Q", "make_pdw", "__version__"]
