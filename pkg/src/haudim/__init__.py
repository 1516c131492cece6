"""Hausdorff dimensions of random time sets.

Closed-form dimension predictions from volume and scale exponents
(:mod:`haudim.scaling`), path simulation and box counting
(:mod:`haudim.paths`, :mod:`haudim.timeset`), subordination
(:mod:`haudim.subordinator`, :mod:`haudim.kernels`) and potential-theoretic
checks (:mod:`haudim.potential`).
"""

__version__ = "0.1.0"
