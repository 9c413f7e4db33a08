"""
Call timing and run statistics for qwdirac
"""

import threading
import time
from functools import wraps
from typing import Any, Callable, Dict, List

from loguru import logger


class MonitoringService:
    """Collects timings of tracked operations"""

    def __init__(self):
        self.calls_log: List[Dict[str, Any]] = []
        self._lock = threading.Lock()

    def track_call(self, component: str, operation: str, duration: float, success: bool = True, **kwargs):
        """Record one call"""
        call_data = {
            'timestamp': time.time(),
            'component': component,
            'operation': operation,
            'duration': duration,
            'success': success,
            'metadata': kwargs
        }
        with self._lock:
            self.calls_log.append(call_data)

        logger.debug(f"Tracked {component}.{operation} ({duration:.3f}s)")

    def get_stats(self) -> Dict[str, Any]:
        """Call counts and durations grouped by operation"""
        with self._lock:
            calls = list(self.calls_log)

        operations: Dict[str, Dict[str, float]] = {}
        for call in calls:
            key = f"{call['component']}.{call['operation']}"
            entry = operations.setdefault(key, {'calls': 0, 'failures': 0, 'total_duration': 0.0})
            entry['calls'] += 1
            entry['total_duration'] += call['duration']
            if not call['success']:
                entry['failures'] += 1

        total_calls = len(calls)
        return {
            'total_calls': total_calls,
            'avg_duration': sum(call['duration'] for call in calls) / max(total_calls, 1),
            'operations': dict(sorted(operations.items()))
        }

    def reset(self):
        with self._lock:
            self.calls_log.clear()


monitor = MonitoringService()


def track_call(component: str, operation: str):
    """Decorator that times a call and records it on the shared monitor"""
    def decorator(func: Callable):
        @wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                duration = time.perf_counter() - start_time
                monitor.track_call(component, operation, duration, success=False)
                logger.debug(f"{component}.{operation} failed after {duration:.3f}s: {e}")
                raise
            duration = time.perf_counter() - start_time
            monitor.track_call(component, operation, duration)
            return result

        return wrapper

    return decorator


__all__ = ["MonitoringService", "monitor", "track_call"]
