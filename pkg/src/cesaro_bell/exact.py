"""Exact big-integer Bell numbers, Stirling partition numbers and surjection
counts.

Python ints are arbitrary precision, so every value here is exact. These
functions are the ground truth that the numerical routes are checked against.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from math import comb, factorial
from typing import List, Tuple

from .exceptions import DomainError, InvariantError

#: Largest index accepted. Values grow super-exponentially and nothing here
#: needs more.
SOFT_CAP = 10000


def _check_index(name: str, value: int) -> int:
    if isinstance(value, bool) or int(value) != value:
        raise DomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < 0:
        raise DomainError(f"{name} must be >= 0, got {value}")
    if value > SOFT_CAP:
        raise DomainError(f"{name}={value} exceeds the soft cap of {SOFT_CAP}")
    return value


@dataclass(frozen=True)
class StirlingRow:
    """Row ``n`` of the Stirling partition triangle, ``entries[k] = S(n, k)``
    for ``k = 0..n``. Entries with ``k > n`` are zero and not stored."""

    n: int
    entries: Tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.n + 1:
            raise InvariantError("Stirling row has wrong length")

    def __getitem__(self, k: int) -> int:
        if k < 0:
            raise IndexError(k)
        return self.entries[k] if k <= self.n else 0

    def __len__(self) -> int:
        return len(self.entries)

    def total(self) -> int:
        return sum(self.entries)


class _Tables:
    # Rows are appended under a lock and never mutated, so readers that grab a
    # snapshot of the list see fully built tuples.
    def __init__(self):
        self.lock = threading.Lock()
        self.stirling: List[Tuple[int, ...]] = [(1,)]
        self.bell: List[int] = [1]
        self.bell_row: List[int] = [1]  # last row of the Bell triangle

    def stirling_upto(self, n: int) -> Tuple[int, ...]:
        rows = self.stirling
        if n < len(rows):
            return rows[n]
        with self.lock:
            while len(self.stirling) <= n:
                prev = self.stirling[-1]
                m = len(prev)  # new row index
                row = [0] * (m + 1)
                for k in range(1, m + 1):
                    left = prev[k - 1]
                    stay = k * prev[k] if k < m else 0
                    row[k] = stay + left
                self.stirling.append(tuple(row))
            return self.stirling[n]

    def bell_upto(self, n: int) -> int:
        values = self.bell
        if n < len(values):
            return values[n]
        with self.lock:
            while len(self.bell) <= n:
                row = self.bell_row
                nxt = [row[-1]]
                for v in row:
                    nxt.append(nxt[-1] + v)
                self.bell_row = nxt
                self.bell.append(nxt[0])
            return self.bell[n]


_TABLES = _Tables()


def bell_exact(n: int) -> int:
    """Bell number B_n from the Bell (Aitken) triangle. ``B_0 = 1``."""
    n = _check_index("n", n)
    return _TABLES.bell_upto(n)


def stirling_row(n: int) -> StirlingRow:
    """Stirling partition numbers S(n, 0..n) by the recurrence
    S(n, k) = k S(n-1, k) + S(n-1, k-1)."""
    n = _check_index("n", n)
    return StirlingRow(n, _TABLES.stirling_upto(n))


def stirling(n: int, k: int) -> int:
    k = _check_index("k", k)
    return stirling_row(n)[k]


def surjections_incl_excl(n: int, k: int) -> int:
    """Number of surjections [n] -> [k] by inclusion-exclusion over the image.

    sum_{j=0..k} (-1)^(k-j) C(k, j) j^n, with 0^0 = 1.
    """
    n = _check_index("n", n)
    k = _check_index("k", k)
    total = 0
    for j in range(k + 1):
        term = comb(k, j) * j**n  # Python defines 0**0 == 1
        total += -term if (k - j) & 1 else term
    if total < 0:
        raise InvariantError(f"negative surjection count for n={n}, k={k}")
    return total


def stirling_incl_excl(n: int, k: int) -> int:
    """S(n, k) as the surjection count divided by k!; the division must be exact."""
    surj = surjections_incl_excl(n, k)
    q, r = divmod(surj, factorial(k))
    if r:
        raise InvariantError(f"{surj} not divisible by {k}! (n={n})")
    return q
