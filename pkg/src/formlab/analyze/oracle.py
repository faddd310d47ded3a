"""Reference k-nullity by brute force over every subspace (test oracle; no pruning)."""
from __future__ import annotations

import numpy as np

from ..exactlin import PrimeField, gaussian_binomial, rref_matrices
from ..exterior import AltForm, to_dense

ORACLE_CAP = 500_000
_CHUNK = 4096


class OracleCapExceeded(RuntimeError):
    pass


def _vanishing_mask(dense: np.ndarray, W: np.ndarray, k: int, p: int) -> np.ndarray:
    """For each basis in W (count, r, n), whether f(W^k, K^n, ...) = 0."""
    count = W.shape[0]
    G = np.broadcast_to(dense, (count, 1) + dense.shape)
    for _ in range(k):
        # G: (count, combos so far, next slot n, remaining slots...)
        G = np.einsum("xsi,xai...->xas...", W, G) % p
        G = G.reshape((count, -1) + G.shape[3:])
    return ~G.reshape(count, -1).any(axis=1)


def oracle_nullity(f: AltForm, k: int, cap: int = ORACLE_CAP) -> int:
    """Exact null_k(f) by testing every subspace, largest dimension first."""
    if not isinstance(f.field, PrimeField):
        raise ValueError("the oracle enumerates subspaces of a finite field")
    if not 1 <= k <= f.s:
        raise ValueError(f"need 1 <= k <= s, got k={k}, s={f.s}")
    q, n = f.field.p, f.n
    total = sum(gaussian_binomial(n, r, q) for r in range(n + 1))
    if total > cap:
        raise OracleCapExceeded(f"{total} subspaces exceed the oracle cap {cap}")
    if f.is_zero():
        return n
    dense = to_dense(f)
    for r in range(n, k - 1, -1):
        mats = rref_matrices(q, n, r)
        for lo in range(0, len(mats), _CHUNK):
            if _vanishing_mask(dense, mats[lo: lo + _CHUNK], k, q).any():
                return r
    # every subspace of dimension < k satisfies the condition vacuously
    return k - 1
