"""Run archive: database models and utilities"""

from db.models import RunRow, LogEntry, Base
from db.database import get_database_url, get_engine, get_sync_session, init_archive
from db.archive import archive_runset, load_archived_runset
from db.logging_handler import ArchiveLogHandler, setup_archive_logging

__all__ = [
    "RunRow",
    "LogEntry",
    "Base",
    "get_database_url",
    "get_engine",
    "get_sync_session",
    "init_archive",
    "archive_runset",
    "load_archived_runset",
    "ArchiveLogHandler",
    "setup_archive_logging",
]
