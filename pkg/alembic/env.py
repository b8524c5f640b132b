from logging.config import fileConfig

from sqlalchemy.engine import Connection

from alembic import context
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Import models and Base for autogenerate support
from db.models import Base
from db.database import get_database_url, get_engine

target_metadata = Base.metadata

# this is the Alembic Config object, which provides
# access to the values within the .ini file in use.
config = context.config

# Same URL resolution as the archive itself (DATABASE_URL, else local sqlite)
database_url, connect_args = get_database_url()
config.set_main_option("sqlalchemy.url", database_url.replace("%", "%%"))
config.attributes["connect_args"] = connect_args

# Interpret the config file for Python logging.
if config.config_file_name is not None:
    fileConfig(config.config_file_name)


def run_migrations_offline() -> None:
    """Run migrations in 'offline' mode.

    Emits SQL to the script output without connecting.
    """
    context.configure(
        url=database_url,
        target_metadata=target_metadata,
        literal_binds=True,
        dialect_opts={"paramstyle": "named"},
        render_as_batch=database_url.startswith("sqlite"),
    )

    with context.begin_transaction():
        context.run_migrations()


def do_run_migrations(connection: Connection) -> None:
    context.configure(
        connection=connection,
        target_metadata=target_metadata,
        render_as_batch=connection.dialect.name == "sqlite",
    )

    with context.begin_transaction():
        context.run_migrations()


def run_migrations_online() -> None:
    """Run migrations in 'online' mode."""
    connectable = get_engine(database_url, config.attributes.get("connect_args"))
    with connectable.connect() as connection:
        do_run_migrations(connection)
    connectable.dispose()


if context.is_offline_mode():
    run_migrations_offline()
else:
    run_migrations_online()
