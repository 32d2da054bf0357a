"""Story-to-reasoning timeline mappings."""

import logging
from typing import Iterator

from reader.history import History, TimelineMapping

logger = logging.getLogger(__name__)


def mapping_allowed(history: History, mapping: TimelineMapping, story_step: int, step: int) -> bool:
    """Whether ``story_step`` may be read at ``step`` after ``mapping``."""
    if story_step != len(mapping) or step <= mapping.last_assigned:
        return False
    if story_step > 0 and history.forced_next(story_step):
        return step == mapping.last_assigned + 1
    return True


def enumerate_mappings(history: History, horizon: int) -> Iterator[TimelineMapping]:
    """Every strictly increasing total mapping into steps ``0..horizon``, lexicographically.

    ``next`` pairs force adjacent reasoning steps. Nothing is yielded when
    the story has more steps than the horizon can hold.
    """
    n = len(history.story_steps)
    if n == 0:
        yield TimelineMapping()
        return
    if n > horizon + 1:
        logger.warning("Horizon %d too small for %d story steps", horizon, n)
        return

    def extend(mapping: TimelineMapping) -> Iterator[TimelineMapping]:
        s = len(mapping)
        if s == n:
            yield mapping
            return
        # Leave room for the remaining story steps.
        last = horizon - (n - s - 1)
        for step in range(mapping.last_assigned + 1, last + 1):
            if mapping_allowed(history, mapping, s, step):
                yield from extend(mapping.extend(step))

    yield from extend(TimelineMapping())
