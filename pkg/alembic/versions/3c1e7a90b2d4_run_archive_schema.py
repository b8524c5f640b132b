"""Run archive schema

Revision ID: 3c1e7a90b2d4
Revises: 
Create Date: 2026-10-18 10:12:03.518277

"""
from typing import Sequence, Union

from alembic import op
import sqlalchemy as sa


# revision identifiers, used by Alembic.
revision: str = '3c1e7a90b2d4'
down_revision: Union[str, Sequence[str], None] = None
branch_labels: Union[str, Sequence[str], None] = None
depends_on: Union[str, Sequence[str], None] = None


def upgrade() -> None:
    """Upgrade schema."""
    op.create_table(
        'run_records',
        sa.Column('id', sa.Uuid(), primary_key=True),
        sa.Column('experiment', sa.String(100), nullable=False),
        sa.Column('heuristic', sa.String(10), nullable=False),
        sa.Column('instance_name', sa.String(100), nullable=False),
        sa.Column('iterations', sa.BigInteger(), nullable=False),
        sa.Column('run_index', sa.Integer(), nullable=False),
        sa.Column('seed', sa.String(20), nullable=False),
        sa.Column('iterations_run', sa.BigInteger(), nullable=False),
        sa.Column('total_time_ns', sa.BigInteger(), nullable=False),
        sa.Column('final_best_cost', sa.BigInteger(), nullable=False),
        sa.Column('targets', sa.JSON(), nullable=False),
        sa.Column('first_hits', sa.JSON(), nullable=False),
        sa.Column('best_perm', sa.JSON(), nullable=False),
        sa.Column('created_at', sa.DateTime(timezone=True), nullable=False, server_default=sa.func.now()),
        sa.UniqueConstraint('experiment', 'heuristic', 'instance_name', 'iterations', 'run_index', name='uq_run_cell'),
    )
    op.create_index('ix_run_records_experiment', 'run_records', ['experiment'])
    op.create_index('ix_run_records_instance_name', 'run_records', ['instance_name'])

    op.create_table(
        'log_entries',
        sa.Column('id', sa.Uuid(), primary_key=True),
        sa.Column('timestamp', sa.DateTime(timezone=True), nullable=False, server_default=sa.func.now()),
        sa.Column('experiment', sa.String(100), nullable=True),
        sa.Column('level', sa.String(20), nullable=False),
        sa.Column('logger_name', sa.String(100), nullable=False),
        sa.Column('message', sa.Text(), nullable=False),
        sa.Column('module', sa.String(100), nullable=True),
        sa.Column('function', sa.String(100), nullable=True),
        sa.Column('line_number', sa.Integer(), nullable=True),
        sa.Column('exception_info', sa.Text(), nullable=True),
        sa.Column('extra_data', sa.JSON(), nullable=True),
    )
    op.create_index('ix_log_entries_timestamp', 'log_entries', ['timestamp'])
    op.create_index('ix_log_entries_experiment', 'log_entries', ['experiment'])
    op.create_index('ix_log_entries_level', 'log_entries', ['level'])
    op.create_index('ix_log_entries_module', 'log_entries', ['module'])


def downgrade() -> None:
    """Downgrade schema."""
    op.drop_index('ix_log_entries_module', table_name='log_entries')
    op.drop_index('ix_log_entries_level', table_name='log_entries')
    op.drop_index('ix_log_entries_experiment', table_name='log_entries')
    op.drop_index('ix_log_entries_timestamp', table_name='log_entries')
    op.drop_table('log_entries')
    op.drop_index('ix_run_records_instance_name', table_name='run_records')
    op.drop_index('ix_run_records_experiment', table_name='run_records')
    op.drop_table('run_records')
