"""Order-preserving map over independent grid tasks."""

import os
from concurrent.futures import ProcessPoolExecutor


def worker_count(workers=None) -> int:
    if workers is not None:
        return max(1, int(workers))
    return max(1, int(os.environ.get("COHMATCH_WORKERS", "1")))


def ordered_map(fn, items, workers=None, chunksize=16) -> list:
    """``list(map(fn, items))``, optionally spread over processes.

    Results always come back in item order, so reductions over them are
    deterministic regardless of scheduling. ``fn`` must be picklable when
    ``workers > 1``.
    """
    items = list(items)
    n = worker_count(workers)
    if n == 1 or len(items) < 2 * chunksize:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items, chunksize=chunksize))
