"""Additive-term bookkeeping for relative residuals.

Displays build their sums through :func:`total`.  Inside a
:func:`track_terms` block every summand's magnitude is recorded, so an
identity check can divide by ``1 + |largest additive term|`` instead of by
the (possibly cancelled) result.
"""

from __future__ import annotations

from contextlib import contextmanager
from contextvars import ContextVar
from typing import Iterator, Optional

import numpy as np

from .jets import value


class TermScale:
    def __init__(self) -> None:
        self.max: np.ndarray | float = 0.0

    def observe(self, term) -> None:
        self.max = np.maximum(self.max, np.abs(value(term)))


_active: ContextVar[Optional[list[TermScale]]] = ContextVar("term_scales", default=None)


def total(*terms):
    for tr in _active.get() or ():
        for t in terms:
            tr.observe(t)
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


@contextmanager
def track_terms() -> Iterator[TermScale]:
    scale = TermScale()
    stack = list(_active.get() or [])
    token = _active.set(stack + [scale])
    try:
        yield scale
    finally:
        _active.reset(token)


def abs_rel(a, b, scale) -> tuple[np.ndarray, np.ndarray]:
    """Absolute residual and residual relative to ``1 + scale``."""
    d = np.abs(np.asarray(value(a)) - np.asarray(value(b)))
    return d, d / (1.0 + np.asarray(scale))
