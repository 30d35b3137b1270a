"""
Database layer for validation-run archiving.

This module stores Monte-Carlo validation runs in SQLite so results from
different seeds, grids and machines can be compared later. It maintains three tables:
    - runs: One row per validation grid entry (parameters and outcome)
    - trials: Per-trial measured distance and exact bound
    - run_log: Historical record of run events

Dependencies:
    - sqlite3: SQLite database operations
    - logging: Application logging
    - datetime: Timestamp generation
    - config: default archive filename

Functions:
    - get_connection: Create database connection
    - init_db: Initialize database schema
    - record_run: Insert a run summary and log it
    - add_trials: Insert the trial records of a run
    - log_event: Append to the run log
    - get_runs: Retrieve run summaries
    - get_trials: Retrieve the trials of one run
"""

import sqlite3
import logging
from datetime import datetime

from config import DEFAULT_DB_FILE

logger = logging.getLogger(__name__)

# ----------------------------
# Utility Functions
# ----------------------------

def get_connection(db_file: str = DEFAULT_DB_FILE):
    """
    Create and return a connection to the SQLite database.

    Returns:
        sqlite3.Connection: Active database connection object

    Note:
        Connection should be used with context manager (with statement)
        to ensure transaction handling; callers close it afterwards.
    """
    return sqlite3.connect(db_file)

# ----------------------------
# Database Initialization
# ----------------------------

def init_db(db_file: str = DEFAULT_DB_FILE):
    """
    Initialize database schema by creating all required tables.

    Table Structure:
        runs: run_id, kind, n_qubits, m, eps_list, trials, seed, violations, max_ratio, finished
        trials: run_id, trial_id, measured_dp, exact_bound, violation
        run_log: log_id, run_id, event_type, event_timestamp

    Note:
        Safe to call multiple times - uses CREATE TABLE IF NOT EXISTS.
    """
    conn = get_connection(db_file)
    try:
        with conn:
            conn.execute("""
                CREATE TABLE IF NOT EXISTS runs (
                    run_id INTEGER PRIMARY KEY AUTOINCREMENT,
                    kind TEXT NOT NULL,
                    n_qubits INTEGER NOT NULL,
                    m INTEGER NOT NULL,
                    eps_list TEXT NOT NULL,
                    trials INTEGER NOT NULL,
                    seed INTEGER NOT NULL,
                    violations INTEGER NOT NULL,
                    max_ratio REAL NOT NULL,
                    finished TIMESTAMP NOT NULL
                )
            """)
            conn.execute("""
                CREATE TABLE IF NOT EXISTS trials (
                    run_id INTEGER NOT NULL,
                    trial_id INTEGER NOT NULL,
                    measured_dp REAL NOT NULL,
                    exact_bound REAL NOT NULL,
                    violation INTEGER NOT NULL,
                    PRIMARY KEY (run_id, trial_id)
                )
            """)
            conn.execute("""
                CREATE TABLE IF NOT EXISTS run_log (
                    log_id INTEGER PRIMARY KEY AUTOINCREMENT,
                    run_id INTEGER,
                    event_type TEXT NOT NULL,  -- 'STARTED' or 'FINISHED'
                    event_timestamp TIMESTAMP NOT NULL
                )
            """)
    finally:
        conn.close()
    logger.info(f"Validation archive initialized at {db_file}")

# ----------------------------
# Run Management Functions
# ----------------------------

def log_event(db_file: str, run_id: int | None, event_type: str):
    """
    Append an event to the run log.

    Args:
        run_id: Run the event belongs to (None before the run row exists)
        event_type: 'STARTED' or 'FINISHED'
    """
    conn = get_connection(db_file)
    try:
        with conn:
            conn.execute(
                "INSERT INTO run_log (run_id, event_type, event_timestamp) VALUES (?, ?, ?)",
                (run_id, event_type, datetime.now().isoformat()),
            )
    finally:
        conn.close()


def record_run(db_file: str, summary: dict) -> int:
    """
    Insert a run summary and log the FINISHED event.

    Args:
        summary: ValidationResult.summary() dictionary

    Returns:
        The new run_id
    """
    conn = get_connection(db_file)
    try:
        with conn:
            cursor = conn.execute(
                """INSERT INTO runs (kind, n_qubits, m, eps_list, trials, seed, violations, max_ratio, finished)
                   VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)""",
                (
                    summary["kind"],
                    summary["n_qubits"],
                    summary["m"],
                    ";".join(repr(e) for e in summary["eps_list"]),
                    summary["trials"],
                    summary["seed"],
                    summary["violations"],
                    summary["max_ratio"],
                    datetime.now().isoformat(),
                ),
            )
            run_id = cursor.lastrowid
    finally:
        conn.close()
    log_event(db_file, run_id, "FINISHED")
    return run_id


def add_trials(db_file: str, run_id: int, records: list):
    """
    Insert the trial records of a run.

    Args:
        records: TrialRecord objects (measured_dp, bound_values['exact'], violation)
    """
    conn = get_connection(db_file)
    try:
        with conn:
            conn.executemany(
                "INSERT INTO trials (run_id, trial_id, measured_dp, exact_bound, violation) VALUES (?, ?, ?, ?, ?)",
                [
                    (run_id, r.trial_id, r.measured_dp, r.bound_values["exact"], int(r.violation))
                    for r in records
                ],
            )
    finally:
        conn.close()

# ----------------------------
# Queries
# ----------------------------

def get_runs(db_file: str = DEFAULT_DB_FILE) -> list[dict]:
    """
    Retrieve all run summaries, oldest first.

    Returns:
        List of dictionaries with the columns of the runs table
    """
    conn = get_connection(db_file)
    try:
        conn.row_factory = sqlite3.Row
        rows = conn.execute("SELECT * FROM runs ORDER BY run_id").fetchall()
        return [dict(row) for row in rows]
    finally:
        conn.close()


def get_trials(db_file: str, run_id: int) -> list[tuple]:
    """
    Retrieve (trial_id, measured_dp, exact_bound, violation) for one run, by trial_id.
    """
    conn = get_connection(db_file)
    try:
        return conn.execute(
            "SELECT trial_id, measured_dp, exact_bound, violation FROM trials WHERE run_id = ? ORDER BY trial_id",
            (run_id,),
        ).fetchall()
    finally:
        conn.close()
