"""Classical baseline solver: bottom-up candidate elimination.

To learn a node's label the solver reads its children's data bits left to
right, keeping only the labels consistent with every bit seen, and then
verifies the survivor against the oracle.  Reading an internal child's bit
first requires solving that child, so the work multiplies with depth; the
verification query doubles as the bit read (on a correct guess the oracle
returns the parent's data bit, and at the root it returns the answer bit).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import IntegrityError, SizeError
from .core import FAIL, QueryRecord, RecursiveOracleSpec, oracle_query

MAX_LABELS = 2**12


@dataclass(frozen=True)
class ClassicalSolveResult:
    answer: int
    queries: int
    log: tuple[QueryRecord, ...]


def classical_solver(spec: RecursiveOracleSpec) -> ClassicalSolveResult:
    """Solve an instance bottom-up; returns the answer bit and exact cost.

    Deterministic: children are read in ascending symbol order and surviving
    candidates are verified in ascending label order, so the query count is
    a pure function of the instance.
    """
    if spec.n_labels > MAX_LABELS:
        raise SizeError(f"label space {spec.n_labels} exceeds solver cap {MAX_LABELS}")
    f_bits = spec.oracle.f_bits
    log: list[QueryRecord] = []

    def learn(path: tuple[int, ...]):
        """Identify the label at ``path`` and return (label, oracle value).

        The returned oracle value is what the successful verification query
        produced: the parent's data bit for this branch, or the instance
        answer bit when ``path`` is the root.
        """
        k = len(path)
        alive = np.ones(spec.n_labels, dtype=bool)
        for x in range(2**spec.n_symbol_bits):
            if int(alive.sum()) == 1:
                break
            child = path + (x,)
            if k + 1 == spec.depth:
                bit = oracle_query(spec, child, log=log)
            else:
                child_label, bit = learn(child)
            alive &= f_bits[:, x] == bit
            if not alive.any():
                raise IntegrityError(f"no label consistent with bits at node {path}")
        for candidate in np.nonzero(alive)[0]:
            result = oracle_query(spec, path, guess=int(candidate), log=log)
            if result != FAIL:
                return int(candidate), result
        raise IntegrityError(f"all surviving candidates failed verification at {path}")

    _root_label, answer = learn(())
    return ClassicalSolveResult(answer=int(answer), queries=len(log), log=tuple(log))
