"""Pure-numpy evaluation kernel; drop-in fallback for the compiled core.

Shares the calling convention of ``ncgeom._evalcore.eval_compiled``: the
polynomial arrives flattened as (letters, offsets, coeffs) with 0-based
letters, and ``X`` is the (g, n, n) stack of symmetric matrices.
"""

import numpy as np


def _word_product(w, X, cache):
    if w not in cache:
        cache[w] = _word_product(w[:-1], X, cache) @ X[w[-1]]
    return cache[w]


def eval_compiled(letters, offsets, coeffs, X):
    n = X.shape[1]
    nterms, rows, cols = coeffs.shape
    out = np.zeros((rows * n, cols * n))
    cache = {(): np.eye(n)}
    for k in range(nterms):
        w = tuple(letters[offsets[k]:offsets[k + 1]])
        out += np.kron(coeffs[k], _word_product(w, X, cache))
    return out
