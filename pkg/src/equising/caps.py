"""Resource caps, scoped with a context variable so callers can tune them
locally (``with use_caps(max_box=10**6): ...``) without threading arguments
through every call."""

from __future__ import annotations

import contextlib
import dataclasses
from contextvars import ContextVar
from typing import Iterator


@dataclasses.dataclass(frozen=True)
class Caps:
    max_box: int = 10**8
    max_bits: int = 4096
    max_primes: int = 4
    max_denominator: int = 10**6


_CAPS: ContextVar[Caps] = ContextVar("equising_caps", default=Caps())


def current() -> Caps:
    return _CAPS.get()


@contextlib.contextmanager
def use_caps(**overrides: int | None) -> Iterator[Caps]:
    values = {k: v for k, v in overrides.items() if v is not None}
    caps = dataclasses.replace(_CAPS.get(), **values)
    token = _CAPS.set(caps)
    try:
        yield caps
    finally:
        _CAPS.reset(token)
