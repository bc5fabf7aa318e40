import json
import uuid
from datetime import datetime
from enum import Enum
from typing import Any
from typing import Optional

import duckdb
from dateutil.relativedelta import relativedelta

from src.pipeline.database import DuckdbClient
from src.pipeline.database import DuckdbConfig


def set_ttl_time(days: int = 30) -> datetime:
    return datetime.now() + relativedelta(days=days)


class Status(Enum):
    queued = "QUEUED"
    running = "RUNNING"
    success = "SUCCESS"
    failed = "FAILED"

    def __str__(self) -> str:
        return str(self.value)


class LogTable:
    def __init__(self, db_conn: duckdb.DuckDBPyConnection, log_table_name: str) -> None:
        self.changes: dict[str, Any] = {}
        self.table = log_table_name
        self.conn = db_conn
        self._init_db()

    def _init_db(self) -> bool:
        """Create table if not exists"""
        query = f"""
            CREATE TABLE IF NOT EXISTS {self.table} (
                run_id VARCHAR
                , command VARCHAR
                , status VARCHAR
                , start_ts TIMESTAMP
                , end_ts TIMESTAMP
                , duration_secs DOUBLE
                , params VARCHAR
                , error_message VARCHAR
                , output_dir VARCHAR
                , ttl TIMESTAMP
                , created_by VARCHAR DEFAULT 'system'
                , created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
                , last_updated_at TIMESTAMP
            )
        """
        self.conn.execute(query)
        return True

    def get(self, run_id: str) -> tuple[int]:
        query = f"SELECT COUNT(1) FROM {self.table} WHERE run_id = ?"
        self.conn.execute(query, [run_id])
        return self.conn.fetchone()

    def save(self, run_id: str) -> bool:
        """save pending changes to the database table"""
        values = list(self.changes.values())
        if self.get(run_id)[0]:
            set_str = ", ".join([f"{key} = ?" for key in self.changes.keys()])
            values.append(run_id)
            query = f"UPDATE {self.table} SET {set_str} WHERE run_id = ?"
        else:
            col_str = ", ".join(self.changes.keys())
            value_str = ",".join(["?"] * len(values))
            query = f"INSERT INTO {self.table}({col_str}) VALUES ({value_str})"

        self.conn.execute(query, values)
        self.changes.clear()
        return True

    def set_attr(self, attribute: str, value: Any) -> bool:
        """track new changes to the table"""
        self.changes.update({attribute: value})
        return True

    def fetch(self, run_id: str) -> Optional[dict]:
        cursor = self.conn.execute(f"SELECT * FROM {self.table} WHERE run_id = ?", [run_id])
        row = cursor.fetchone()
        if row is None:
            return None
        columns = [c[0] for c in cursor.description]
        return dict(zip(columns, row))


class RunLogHandler:
    """Tracks each command run as a row of the run-log table."""

    def __init__(
        self,
        db_file: str = ":memory:",
        table_name: str = "run_log",
        ttl_days: int = 30,
        created_by: str = "system",
    ):
        self.client = DuckdbClient(DuckdbConfig(db_file=db_file))
        self.log_table = LogTable(db_conn=self.client.conn, log_table_name=table_name)
        self.ttl_days = ttl_days
        self.created_by = created_by
        self.run_id = ""

    @classmethod
    def from_config(cls, config: dict) -> "RunLogHandler":
        return cls(**(config.get("logging", {}).get("run_log", {})))

    def create(self, command: str, params: dict, output_dir: Optional[str] = None) -> str:
        self.run_id = f"{command}#{uuid.uuid4()}"
        now = datetime.now()
        self.log_table.set_attr("run_id", self.run_id)
        self.log_table.set_attr("command", command)
        self.log_table.set_attr("status", str(Status.queued))
        self.log_table.set_attr("params", json.dumps(params, sort_keys=True, default=str))
        self.log_table.set_attr("output_dir", output_dir)
        self.log_table.set_attr("ttl", set_ttl_time(self.ttl_days))
        self.log_table.set_attr("created_by", self.created_by)
        self.log_table.set_attr("last_updated_at", now)
        self.log_table.save(self.run_id)
        return self.run_id

    def start(self) -> None:
        now = datetime.now()
        self.log_table.set_attr("status", str(Status.running))
        self.log_table.set_attr("start_ts", now)
        self.log_table.set_attr("last_updated_at", now)
        self.log_table.save(self.run_id)

    def success(self, duration_secs: Optional[float] = None) -> None:
        self._finish(Status.success, duration_secs=duration_secs)

    def failed(self, error_message: str = "Error") -> None:
        self._finish(Status.failed, error_message=error_message)

    def _finish(self, status: Status, error_message=None, duration_secs=None) -> None:
        now = datetime.now()
        self.log_table.set_attr("status", str(status))
        self.log_table.set_attr("end_ts", now)
        self.log_table.set_attr("last_updated_at", now)
        if error_message is not None:
            self.log_table.set_attr("error_message", error_message)
        if duration_secs is not None:
            self.log_table.set_attr("duration_secs", duration_secs)
        self.log_table.save(self.run_id)

    def close(self) -> None:
        self.client.close()
