import os


def worker_count() -> int:
    """Worker cap from FIBSNAKE_THREADS (0 or unset means one per CPU)."""
    raw = os.environ.get("FIBSNAKE_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"FIBSNAKE_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"FIBSNAKE_THREADS must be >= 0, got {n}")
    return n or (os.cpu_count() or 1)
