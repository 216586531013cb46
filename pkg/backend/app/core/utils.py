"""
diffset toolkit - Core Utilities
Seed derivation, timing and range parsing shared by the drivers.
"""
import hashlib
import time
from contextlib import contextmanager
from typing import Iterator

from .exceptions import InvalidRange


def derive_seed(master_seed: int, index: int) -> int:
    """
    Derive the seed of one instance from the master seed.

    The derivation depends only on (master_seed, index), so results do not
    depend on how instances are distributed over workers.

    Args:
        master_seed: Seed given on the command line
        index: Instance index within the suite

    Returns:
        64-bit nonnegative seed
    """
    payload = f"{master_seed}:{index}".encode("utf-8")
    digest = hashlib.blake2b(payload, digest_size=8).digest()
    return int.from_bytes(digest, "little")


@contextmanager
def stopwatch() -> Iterator[dict[str, int]]:
    """
    Measure wall time of a block in milliseconds.

    Example:
        with stopwatch() as timing:
            run()
        timing["ms"]
    """
    timing = {"ms": 0}
    start = time.perf_counter()
    try:
        yield timing
    finally:
        timing["ms"] = int((time.perf_counter() - start) * 1000)


def parse_int_range(text: str) -> list[int]:
    """
    Parse '11,13', '2..100' or mixed '5,7..9' into a sorted list of integers.

    Args:
        text: Range expression

    Returns:
        Sorted list without duplicates

    Raises:
        InvalidRange: On malformed or empty input
    """
    values: set[int] = set()
    for part in (p.strip() for p in text.split(",")):
        if not part:
            continue
        try:
            if ".." in part:
                lo_text, hi_text = part.split("..", 1)
                lo, hi = int(lo_text), int(hi_text)
                if lo > hi:
                    raise InvalidRange(f"Empty range '{part}'")
                values.update(range(lo, hi + 1))
            else:
                values.add(int(part))
        except ValueError as e:
            if isinstance(e, InvalidRange):
                raise
            raise InvalidRange(f"Malformed integer range '{text}'") from e
    if not values:
        raise InvalidRange(f"Range '{text}' is empty")
    return sorted(values)


def parse_float_range(text: str) -> tuple[float, float]:
    """
    Parse a density range: '0.3' (point), '0.1..0.5', or a list '0.1,0.3'
    whose smallest and largest entries bound the range.

    Returns:
        (low, high) with 0 < low <= high <= 1
    """
    try:
        if ".." in text:
            lo_text, hi_text = text.split("..", 1)
            lo, hi = float(lo_text), float(hi_text)
        elif "," in text:
            values = [float(p) for p in text.split(",") if p.strip()]
            lo, hi = min(values), max(values)
        else:
            lo = hi = float(text)
    except ValueError as e:
        raise InvalidRange(f"Malformed density range '{text}'") from e
    if not 0.0 < lo <= hi <= 1.0:
        raise InvalidRange(f"Density range '{text}' must satisfy 0 < lo <= hi <= 1")
    return lo, hi
