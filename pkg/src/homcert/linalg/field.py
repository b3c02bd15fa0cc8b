from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from homcert.errors import NotPrime


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    """The field F_p.  Elements are Python/numpy integers in ``range(p)``."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not is_prime(int(self.p)):
            raise NotPrime(f"characteristic must be prime, got {self.p!r}")
        object.__setattr__(self, "p", int(self.p))

    def __repr__(self):
        return f"F_{self.p}"

    def __len__(self):
        return self.p

    def elements(self):
        return range(self.p)

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.p - 2, self.p)

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def vector(self, values) -> np.ndarray:
        return np.asarray(values, dtype=np.int64) % self.p

    def zeros(self, n: int) -> np.ndarray:
        return np.zeros(n, dtype=np.int64)
