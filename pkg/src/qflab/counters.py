"""Global counter of circuit-expectation evaluations.

Every computed expectation value <psi| M |psi> counts as one evaluation,
no matter how the backend shares work between them.  The budget tests
(2d+1 evaluations per cost gradient, O(d*m*n) per attack-loss gradient)
read this counter.
"""

_count = 0


def reset() -> None:
    global _count
    _count = 0


def add(k: int = 1) -> None:
    global _count
    _count += k


def value() -> int:
    return _count
