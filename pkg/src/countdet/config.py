from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

from .errors import Timeout


@dataclass
class Limits:
    """Resource caps shared by the constructions.

    ``deadline`` is an absolute ``time.monotonic()`` value checked
    cooperatively inside worklist loops.
    """

    max_states: int = 2 ** 22
    max_spheres: int = 100_000
    max_partition_terms: int = 9
    max_bound: int = 2 ** 20
    deadline: Optional[float] = None

    @classmethod
    def with_timeout(cls, seconds: Optional[float], **kw) -> Limits:
        deadline = time.monotonic() + seconds if seconds else None
        return cls(deadline=deadline, **kw)

    def check_time(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise Timeout("deadline exceeded")


DEFAULT_LIMITS = Limits()
