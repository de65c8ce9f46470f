"""Subcritical random-cluster simulation lab.

Submodules: lattice (discrete geometry), exact (enumeration oracle), sampler
(MCMC chains), growth (direct q=1 cluster growth), observables (estimators),
explorer (slab exploration), kmrp (killed renewal calculus), wulff (shape
duality), cli (experiment driver).
"""

__version__ = "0.1.0"
