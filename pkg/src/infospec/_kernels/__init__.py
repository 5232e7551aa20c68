"""Hot kernels with a numba backend and a pure-numpy fallback.

Set ``INFOSPEC_DISABLE_NUMBA=1`` to force the numpy path (it is also used
automatically when numba cannot be imported).
"""
import os

from . import numpy_impl

BACKEND = "numpy"
_impl = numpy_impl
if os.environ.get("INFOSPEC_DISABLE_NUMBA", "0").lower() in ("", "0", "false", "no"):
    try:
        from . import numba_impl as _impl

        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is a declared dependency
        pass

splitmix64 = _impl.splitmix64
uniforms = _impl.uniforms
sample_chain = _impl.sample_chain
sample_given = _impl.sample_given
ml_decode = _impl.ml_decode
map_decode = _impl.map_decode

__all__ = [
    "BACKEND", "splitmix64", "uniforms", "sample_chain", "sample_given",
    "ml_decode", "map_decode",
]
