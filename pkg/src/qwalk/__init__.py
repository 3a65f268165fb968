"""Discrete-time quantum walks coupled to lattice gauge fields.

Subpackages cover the homogeneous walk kernel, Abelian and non-Abelian
gauge couplings, curved-spacetime walks, a spectral Dirac reference
integrator, measurement-averaged walks, and the experiment harness
behind the ``qwalk`` command line tool.

Setting the environment variable ``QWALK_THREADS`` before the first import
caps the BLAS/OpenMP thread pools (it seeds OMP_NUM_THREADS and friends,
without clobbering values already present in the environment).
"""

import os as _os

_threads = _os.environ.get("QWALK_THREADS")
if _threads:
    for _var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
    ):
        _os.environ.setdefault(_var, _threads)
del _os, _threads

from qwalk.lattice import (
    CoinAngles,
    SpinorField,
    build_coin_euler,
    canonicalize_angles,
    convert_convention,
    dispersion,
    factor_unitary,
    inverse_shift,
    shift,
    spin_phase,
    standard_coin,
    step,
    step_standard,
    walk_operator_fourier,
)

__all__ = [
    "CoinAngles",
    "SpinorField",
    "build_coin_euler",
    "canonicalize_angles",
    "convert_convention",
    "dispersion",
    "factor_unitary",
    "inverse_shift",
    "shift",
    "spin_phase",
    "standard_coin",
    "step",
    "step_standard",
    "walk_operator_fourier",
]

__version__ = "0.1.0"
