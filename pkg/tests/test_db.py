import sqlite3

import pytest

from database.db import add_trials, get_runs, get_trials, init_db, log_event, record_run
from harness import monte_carlo_validate


@pytest.fixture
def db_file(tmp_path):
    path = str(tmp_path / "runs.db")
    init_db(path)
    return path


class TestArchive:
    def test_init_is_idempotent(self, db_file):
        init_db(db_file)
        with sqlite3.connect(db_file) as conn:
            tables = {row[0] for row in conn.execute("SELECT name FROM sqlite_master WHERE type='table'")}
        assert {"runs", "trials", "run_log"} <= tables

    def test_record_and_read_back(self, db_file):
        result = monte_carlo_validate(1, 3, 0.05, trials=10, seed=3)
        run_id = record_run(db_file, result.summary())
        add_trials(db_file, run_id, result.records)

        runs = get_runs(db_file)
        assert len(runs) == 1
        assert runs[0]["kind"] == "product"
        assert runs[0]["eps_list"] == "0.05;0.05;0.05"
        assert runs[0]["violations"] == 0

        trials = get_trials(db_file, run_id)
        assert [t[0] for t in trials] == list(range(10))
        assert trials[4][1] == result.records[4].measured_dp

    def test_run_log(self, db_file):
        log_event(db_file, None, "STARTED")
        run_id = record_run(db_file, monte_carlo_validate(1, 2, 0.01, trials=2, seed=0).summary())
        with sqlite3.connect(db_file) as conn:
            events = conn.execute("SELECT run_id, event_type FROM run_log ORDER BY log_id").fetchall()
        assert events == [(None, "STARTED"), (run_id, "FINISHED")]
