import json
import logging
import time

import redis
from django.conf import settings
from redis.exceptions import ConnectionError as RedisConnectionError, TimeoutError as RedisTimeoutError

logger = logging.getLogger(__name__)

STATUS_TTL_S = 60
RETRY_AFTER_S = 30
REDIS_ERRORS = (RedisConnectionError, RedisTimeoutError, OSError)


def engine_status(state, snapshot, theme_id, leader, dropped):
    return {
        "cycle": state.cycle_index,
        "measure": state.measure_index,
        "affect": snapshot.as_dict(),
        "theme": theme_id,
        "leader": leader,
        "dropped_messages": dropped,
        "chords": state.chord_history[-8:],
    }


class StatusPublisher:
    """
    Writes the latest engine status to Redis. A dead Redis never stops the
    engine: publishing pauses for RETRY_AFTER_S and the outage is logged once.
    """

    def __init__(self, key="ams:status", client=None, clock=time.monotonic):
        self.key = key
        self.client = client or redis.Redis.from_url(settings.REDIS_URL, socket_timeout=0.2)
        self.clock = clock
        self._retry_at = None

    @property
    def available(self):
        return self._retry_at is None or self.clock() >= self._retry_at

    def publish(self, status):
        if not self.available:
            return False
        try:
            self.client.set(self.key, json.dumps(status, sort_keys=True), ex=STATUS_TTL_S)
        except REDIS_ERRORS as exc:
            if self._retry_at is None:
                logger.warning("status channel unavailable, retrying in %ds: %s", RETRY_AFTER_S, exc)
            self._retry_at = self.clock() + RETRY_AFTER_S
            return False
        if self._retry_at is not None:
            logger.info("status channel back")
        self._retry_at = None
        return True


def read_status(key="ams:status", client=None):
    """Last published status, or None when Redis is down or nothing was published."""
    client = client or redis.Redis.from_url(settings.REDIS_URL, socket_timeout=0.2)
    try:
        raw = client.get(key)
    except REDIS_ERRORS:
        return None
    return json.loads(raw) if raw else None
