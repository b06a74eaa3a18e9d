"""Hot kernels, dispatched to numba or numpy according to ``TAILSIM_BACKEND``."""

from ._backend import BACKEND

if BACKEND == "numba":
    from ._numba_kernels import event_pairs, moment_sums, ndtri_upper, year_chunk
else:
    from ._numpy_kernels import event_pairs, moment_sums, ndtri_upper, year_chunk

__all__ = ["BACKEND", "event_pairs", "moment_sums", "ndtri_upper", "year_chunk"]
