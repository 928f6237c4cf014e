"""Error types shared across the package.

DomainError marks invalid inputs (bad quantum numbers, shape mismatches,
malformed configs); NumericError marks a computation that ran but failed a
numerical sanity check (e.g. an eigensolver residual above tolerance).
The CLI maps them to exit codes 2 and 3 respectively.
"""


class DomainError(ValueError):
    pass


class NumericError(RuntimeError):
    pass
