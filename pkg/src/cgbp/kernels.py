"""Kernel backend selection.

The hot per-epoch work (sparse neighborhood sums, edge-wise loss terms,
discrete objective counts) lives in a small C extension built from
``_ckernels.pyx``. When the extension is missing the NumPy/SciPy fallback in
``_pykernels`` is used instead; both expose the same functions and agree
numerically.

Set ``CGBP_KERNELS=python`` or ``CGBP_KERNELS=compiled`` to force a backend.
"""

import os

import numpy as np

_FORCE = os.environ.get("CGBP_KERNELS", "").strip().lower()
if _FORCE not in ("", "python", "compiled"):
    raise ImportError(f"CGBP_KERNELS must be 'python' or 'compiled', got {_FORCE!r}")

if _FORCE == "python":
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _FORCE == "compiled":
            raise
        from . import _pykernels as _impl

BACKEND = _impl.backend_name()

mis_loss_grad = _impl.mis_loss_grad
mc_loss_grad = _impl.mc_loss_grad
gc_loss_grad = _impl.gc_loss_grad
cut_count = _impl.cut_count
same_value_count = _impl.same_value_count
both_selected_count = _impl.both_selected_count
csr_weighted_sum = _impl.csr_weighted_sum


class Propagator:
    """Entry-weighted neighborhood sum prepared once per (graph, weights).

    ``prop(x)`` returns ``out`` with ``out[i] = sum_e w[e] * x[cols[e]]`` over
    the CSR entries of row i. ``x`` may be a vector or an (n, k) matrix.
    """

    def __init__(self, offsets, cols, weights):
        self.offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        self.cols = np.ascontiguousarray(cols, dtype=np.int64)
        self.weights = np.ascontiguousarray(weights, dtype=np.float64)
        self.n = self.offsets.shape[0] - 1

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        squeeze = x.ndim == 1
        if squeeze:
            x = x[:, None]
        out = csr_weighted_sum(self.offsets, self.cols, self.weights,
                               np.ascontiguousarray(x))
        return out[:, 0] if squeeze else out
