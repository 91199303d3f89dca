import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

# pairs (target, node) evaluated per block
BLOCK_PAIRS = 1_000_000


def thread_count():
    raw = os.environ.get("SINGULAR_BIE_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(n, 1)


def row_blocks(n_rows, n_cols):
    step = max(1, BLOCK_PAIRS // max(n_cols, 1))
    return [(i, min(i + step, n_rows)) for i in range(0, n_rows, step)]


def fill_rows(out, block_fn):
    """Fill ``out[i0:i1]`` with ``block_fn(i0, i1)`` for every row block.

    Blocks write disjoint rows, so they may run on a thread pool; numpy
    releases the GIL inside the heavy array operations.
    """
    blocks = row_blocks(out.shape[0], out.shape[1] if out.ndim > 1 else 1)
    n = thread_count()

    def run(b):
        out[b[0]:b[1]] = block_fn(*b)

    if n == 1 or len(blocks) == 1:
        for b in blocks:
            run(b)
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            list(pool.map(run, blocks))
    return out


def empty(n_rows, n_cols):
    return np.empty((n_rows, n_cols), dtype=float)
