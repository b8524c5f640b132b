"""Archive database connection and session management

The archive is a local sqlite file unless DATABASE_URL points elsewhere.
PostgreSQL URLs are normalised to the psycopg2 driver.
"""

from sqlalchemy import create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.orm import sessionmaker, Session
from contextlib import contextmanager
from pathlib import Path
import os
import logging
from typing import Dict, Iterator, Optional, Tuple, Union, Any
from urllib.parse import urlparse, urlunparse, parse_qs, urlencode
from dotenv import load_dotenv

from db.models import Base

load_dotenv()

logger = logging.getLogger(__name__)

DEFAULT_ARCHIVE_NAME = "qap_archive.db"


def get_database_url(out_dir: Optional[Union[str, Path]] = None) -> Tuple[str, Dict[str, Any]]:
    """
    Get the archive database URL.

    Returns:
        Tuple of (url, connect_args)
    """
    database_url = os.getenv("DATABASE_URL")
    if not database_url:
        path = Path(out_dir or ".") / DEFAULT_ARCHIVE_NAME
        return f"sqlite:///{path}", {}

    parsed = urlparse(database_url)
    if not parsed.scheme.startswith("postgres"):
        return database_url, {}

    # sslmode goes through connect_args
    query_params = parse_qs(parsed.query)
    ssl_args: Dict[str, Any] = {}
    if "sslmode" in query_params:
        ssl_args["sslmode"] = query_params.pop("sslmode")[0]

    clean_url = urlunparse((
        "postgresql+psycopg2",
        parsed.netloc,
        parsed.path,
        parsed.params,
        urlencode(query_params, doseq=True),
        parsed.fragment,
    ))
    return clean_url, ssl_args


def get_engine(url: Optional[str] = None, connect_args: Optional[Dict[str, Any]] = None) -> Engine:
    """Create an engine for the archive (defaults from get_database_url)"""
    if url is None:
        url, connect_args = get_database_url()
    if url.startswith("sqlite"):
        return create_engine(url, echo=False, connect_args=connect_args or {})
    return create_engine(
        url,
        echo=False,
        pool_pre_ping=True,
        pool_size=3,
        max_overflow=2,
        pool_recycle=300,
        connect_args=connect_args or {},
    )


@contextmanager
def get_sync_session(engine: Engine) -> Iterator[Session]:
    """Get a sync database session with automatic cleanup"""
    session = sessionmaker(engine, expire_on_commit=False)()
    try:
        yield session
        session.commit()
    except Exception:
        session.rollback()
        raise
    finally:
        session.close()


def init_archive(engine: Engine):
    """Create the archive tables if missing; managed databases use alembic instead"""
    if engine.url.get_backend_name() == "sqlite" and engine.url.database:
        Path(engine.url.database).parent.mkdir(parents=True, exist_ok=True)
    Base.metadata.create_all(engine)
    logger.debug(f"Archive tables ready on {engine.url.render_as_string(hide_password=True)}")
