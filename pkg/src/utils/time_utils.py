"""Time utilities for run bookkeeping."""

import time
from datetime import datetime, timezone
from typing import Optional


class TimeUtils:
    """Utility class for wall-clock operations.

    Wall-clock values never enter report files; they name run directories and
    fill the timing sidecar only.
    """

    RUN_STAMP_FORMAT = "%Y%m%dT%H%M%SZ"

    @staticmethod
    def get_utc_now() -> datetime:
        """Get current UTC time.

        Returns:
            Current UTC datetime
        """
        return datetime.now(timezone.utc)

    @staticmethod
    def run_stamp(dt: Optional[datetime] = None) -> str:
        """Format a datetime as a compact, filename-safe run stamp.

        Args:
            dt: Datetime to format. Defaults to now (UTC)

        Returns:
            Stamp such as ``20240101T123045Z``
        """
        dt = dt or TimeUtils.get_utc_now()
        return dt.astimezone(timezone.utc).strftime(TimeUtils.RUN_STAMP_FORMAT)

    @staticmethod
    def parse_run_stamp(stamp: str) -> datetime:
        """Parse a run stamp back into an aware UTC datetime.

        Raises:
            ValueError: If the stamp does not match the run stamp format
        """
        dt = datetime.strptime(stamp, TimeUtils.RUN_STAMP_FORMAT)
        return dt.replace(tzinfo=timezone.utc)


class Stopwatch:
    """Context manager measuring elapsed seconds with a monotonic clock."""

    def __init__(self):
        self.started_at: Optional[datetime] = None
        self.elapsed_s: float = 0.0
        self._t0 = 0.0

    def __enter__(self) -> "Stopwatch":
        self.started_at = TimeUtils.get_utc_now()
        self._t0 = time.perf_counter()
        return self

    def __exit__(self, *exc) -> None:
        self.elapsed_s = time.perf_counter() - self._t0

    def as_dict(self) -> dict:
        """Timing sidecar payload."""
        return {
            "started_at": self.started_at.isoformat() if self.started_at else None,
            "elapsed_s": self.elapsed_s,
        }
