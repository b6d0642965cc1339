"""Deterministic seed derivation and a worker pool whose output is
independent of the worker count."""

from __future__ import annotations

import hashlib
import os
import struct
from concurrent.futures import ProcessPoolExecutor


def derive_seed(master_seed: int, stream_label: str, index: int) -> int:
    """Collision-resistant 64-bit stream seed: sha256(master || label || index)."""
    h = hashlib.sha256()
    h.update(struct.pack("<Q", master_seed & 0xFFFFFFFFFFFFFFFF))
    h.update(stream_label.encode())
    h.update(struct.pack("<Q", index & 0xFFFFFFFFFFFFFFFF))
    return int.from_bytes(h.digest()[:8], "little")


def default_workers() -> int:
    env = os.environ.get("DIFFCODES_WORKERS")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def deterministic_map(fn, tasks, workers: int | None = None):
    """Apply fn to tasks, preserving task order in the results.

    Tasks must be self-contained (fn derives all randomness from the task
    itself), so the result list is identical for any worker count.
    """
    tasks = list(tasks)
    if workers is None:
        workers = default_workers()
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))
