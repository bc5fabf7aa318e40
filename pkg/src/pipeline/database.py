from dataclasses import dataclass

import duckdb

from src.exceptions import OutputPathError


@dataclass
class DuckdbConfig:
    db_file: str = ":memory:"


class DuckdbClient:
    def __init__(self, config: DuckdbConfig) -> None:
        try:
            self.conn = duckdb.connect(config.db_file)
        except duckdb.Error as err:
            raise OutputPathError(f"Cannot open run log '{config.db_file}': {err}") from err

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        self.close()

    def close(self) -> None:
        self.conn.close()
