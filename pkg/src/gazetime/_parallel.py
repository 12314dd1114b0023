"""Order-preserving thread map for embarrassingly parallel stages."""

from concurrent.futures import ThreadPoolExecutor


def thread_map(fn, items, threads: int = 1) -> list:
    """Apply ``fn`` to items, optionally on a thread pool.

    Results are returned in input order, so outputs are independent of the
    thread count; ``fn`` must be a pure function of its argument.
    """
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
