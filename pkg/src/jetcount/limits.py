"""Work budgets, the prime floor, and the errors raised when they are violated."""
from __future__ import annotations

from dataclasses import dataclass

DEFAULT_BUDGET = 10**8
DEFAULT_PRIME_FLOOR = 3


class BudgetExceeded(RuntimeError):
    """An enumeration would need more work than the budget allows."""

    def __init__(self, what: str, required: int, allowed: int):
        super().__init__(f"{what}: needs {required} steps, budget is {allowed}")
        self.required = required
        self.allowed = allowed


class PrimeFloorError(ValueError):
    pass


@dataclass(frozen=True)
class Limits:
    budget: int = DEFAULT_BUDGET
    prime_floor: int = DEFAULT_PRIME_FLOOR

    def require(self, what: str, required: int) -> None:
        if required > self.budget:
            raise BudgetExceeded(what, required, self.budget)

    def check_prime(self, p: int) -> None:
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if p < self.prime_floor:
            raise PrimeFloorError(f"prime {p} is below the floor {self.prime_floor}")


DEFAULT_LIMITS = Limits()


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    # deterministic Miller-Rabin for n < 3.3e24
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True
