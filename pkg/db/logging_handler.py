"""Database logging handler for the run archive"""

import json
import logging
import sys
import threading
import traceback
from queue import Queue, Empty
from typing import Optional

from sqlalchemy.engine import Engine

from db.database import get_sync_session
from db.models import LogEntry

# Attributes every LogRecord carries; anything else came in through extra=
_RECORD_ATTRS = {
    'name', 'msg', 'args', 'created', 'filename', 'funcName', 'levelname', 'levelno', 'lineno',
    'module', 'msecs', 'pathname', 'process', 'processName', 'relativeCreated', 'stack_info',
    'exc_info', 'exc_text', 'thread', 'threadName', 'message', 'taskName',
}


class ArchiveLogHandler(logging.Handler):
    """
    Logging handler that writes to the archive database.

    Uses a background thread and queue so a sweep never waits on the database.
    """

    def __init__(
        self,
        engine: Engine,
        experiment: Optional[str] = None,
        level: int = logging.INFO,
        batch_size: int = 10,
        flush_interval: float = 5.0,
    ):
        """
        Args:
            engine: Archive engine
            experiment: Label stored with every entry
            level: Lowest level stored
            batch_size: Entries per database write
            flush_interval: Seconds a partial batch may wait
        """
        super().__init__(level)
        self.engine = engine
        self.experiment = experiment
        self.batch_size = batch_size
        self.flush_interval = flush_interval

        self._queue: Queue = Queue()
        self._stop_event = threading.Event()
        self._worker_thread: Optional[threading.Thread] = None

        # their own records would re-enter this handler
        self._excluded_loggers = ('sqlalchemy', 'alembic')

    def start(self):
        """Start the writer thread"""
        if self._worker_thread is None or not self._worker_thread.is_alive():
            self._stop_event.clear()
            self._worker_thread = threading.Thread(target=self._worker_loop, name="ArchiveLogWorker", daemon=True)
            self._worker_thread.start()

    def stop(self):
        """Stop the worker thread after it has written everything queued"""
        self._stop_event.set()
        if self._worker_thread and self._worker_thread.is_alive():
            self._worker_thread.join(timeout=5.0)

    def close(self):
        self.stop()
        super().close()

    def emit(self, record: logging.LogRecord):
        """Queue the record; the writer thread stores it"""
        if record.name.startswith(self._excluded_loggers):
            return

        try:
            entry = {
                'experiment': self.experiment,
                'level': record.levelname,
                'logger_name': record.name,
                'message': self.format(record) if self.formatter else record.getMessage(),
                'module': record.module,
                'function': record.funcName,
                'line_number': record.lineno,
                'exception_info': None,
                'extra_data': None,
            }

            if record.exc_info:
                entry['exception_info'] = ''.join(traceback.format_exception(*record.exc_info))

            extra = {}
            for key, value in record.__dict__.items():
                if key in _RECORD_ATTRS:
                    continue
                try:
                    json.dumps(value)
                    extra[key] = value
                except (TypeError, ValueError):
                    pass
            if extra:
                entry['extra_data'] = extra

            self._queue.put(entry)
        except Exception:
            self.handleError(record)

    def _drain(self) -> list:
        batch = []
        while True:
            try:
                batch.append(self._queue.get_nowait())
            except Empty:
                return batch

    def _worker_loop(self):
        """Writer thread body; drains the queue once more on stop"""
        batch = []
        while not self._stop_event.is_set():
            try:
                try:
                    batch.append(self._queue.get(timeout=self.flush_interval))
                except Empty:
                    pass

                if len(batch) >= self.batch_size or (batch and self._queue.empty()):
                    self._flush_batch(batch)
                    batch = []
            except Exception as e:
                # Can't use logging from inside the handler
                print(f"ArchiveLogHandler worker error: {e}", file=sys.stderr)

        batch.extend(self._drain())
        self._flush_batch(batch)

    def _flush_batch(self, batch: list):
        """Store a batch of entries in one session"""
        if not batch:
            return
        try:
            with get_sync_session(self.engine) as session:
                session.add_all(LogEntry(**entry) for entry in batch)
        except Exception as e:
            print(f"ArchiveLogHandler flush error: {e}", file=sys.stderr)


def setup_archive_logging(
    engine: Engine,
    experiment: Optional[str] = None,
    level: int = logging.INFO,
    batch_size: int = 10,
    flush_interval: float = 5.0,
) -> ArchiveLogHandler:
    """
    Attach an ArchiveLogHandler to the root logger and start it.

    Returns:
        The running handler; call stop() (or close()) to flush it
    """
    handler = ArchiveLogHandler(
        engine,
        experiment=experiment,
        level=level,
        batch_size=batch_size,
        flush_interval=flush_interval,
    )
    handler.setFormatter(logging.Formatter('%(message)s'))
    logging.getLogger().addHandler(handler)
    handler.start()
    return handler
