"""Thread-count policy and an order-preserving parallel map."""
import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ValidationError


def thread_count() -> int:
    """Worker cap from ``WAMS_THREADS`` (default: number of CPUs)."""
    raw = os.environ.get("WAMS_THREADS", "").strip()
    if not raw:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"WAMS_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValidationError(f"WAMS_THREADS must be a positive integer, got {raw!r}")
    return n


def ordered_map(fn, items, threads=None):
    """``[fn(x) for x in items]`` evaluated on up to ``threads`` workers.

    Results keep input order. Exceptions surface as ``(None, exc)`` pairs so
    callers can stop at the first failure in order.
    """
    items = list(items)
    threads = thread_count() if threads is None else threads

    def guarded(x):
        try:
            return fn(x), None
        except Exception as exc:  # re-raised or reported by the caller
            return None, exc

    if threads <= 1 or len(items) <= 1:
        return [guarded(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(guarded, items))
