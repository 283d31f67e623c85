"""Run generator-based recursion on an explicit stack.

A computation is a generator that ``yield``s sub-computations (other
generators) and receives their return values.  Exceptions abort the whole
run; nothing in this package catches a failure half-way up.
"""

from typing import Any, Generator

Computation = Generator[Any, Any, Any]


def run(comp: Computation) -> Any:
    stack = [comp]
    value = None
    while stack:
        try:
            child = stack[-1].send(value)
        except StopIteration as stop:
            stack.pop()
            value = stop.value
        else:
            stack.append(child)
            value = None
    return value
