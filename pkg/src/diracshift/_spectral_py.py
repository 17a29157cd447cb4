"""Pure numpy spectral summation kernel (fallback for the compiled one)."""

from __future__ import annotations

import numpy as np

__all__ = ["synthesize"]


def synthesize(coef, k_start: float, dk: float, z, block: int = 128) -> np.ndarray:
    """Evaluate ``out[c, i] = sum_j coef[c, j] exp(1j (k_start + j dk) z[i])``.

    Nodes are processed in blocks; within a block the phases are exact
    exponentials and the partial sums of consecutive blocks are combined with
    Kahan compensation.

    Parameters
    ----------
    coef : array_like, shape (C, N), complex
        Spectral coefficients (quadrature weights already applied).
    k_start : float
        Wavenumber of node 0.
    dk : float
        Node spacing.
    z : array_like, shape (M,)
        Evaluation positions.
    block : int
        Number of nodes per block.

    Returns
    -------
    ndarray, shape (C, M), complex
    """
    coef = np.ascontiguousarray(coef, dtype=np.complex128)
    z = np.ascontiguousarray(z, dtype=np.float64)
    nch, nodes = coef.shape
    total = np.zeros((z.size, nch), dtype=np.complex128)
    comp = np.zeros_like(total)
    offsets = np.arange(block, dtype=np.float64) * dk
    steps = np.exp(1j * np.outer(z, offsets))
    for b0 in range(0, nodes, block):
        nb = min(block, nodes - b0)
        base = np.exp(1j * (k_start + b0 * dk) * z)
        partial = (base[:, None] * steps[:, :nb]) @ coef[:, b0 : b0 + nb].T
        y = partial - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return np.ascontiguousarray(total.T)
