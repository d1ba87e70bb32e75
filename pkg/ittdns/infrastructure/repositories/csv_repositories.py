"""
🗄️ CSV Repository Implementations
Run tables (timeseries, spectra, bounds), sidecar headers and the run manifest
"""
import csv
import json
import math
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd
from loguru import logger

from ...application.interfaces import IRunOutputRepository, ITableWriter
from ...domain.errors import OutputError


def _cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        return repr(value)
    return value


class CsvTableWriter(ITableWriter):
    """Streaming CSV writer with a fixed header"""

    def __init__(self, path: Path, columns: Sequence[str], append: bool = False):
        self.path = Path(path)
        self.columns = list(columns)
        exists = self.path.exists() and self.path.stat().st_size > 0
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._handle = open(self.path, "a" if append else "w", newline="", encoding="utf-8")
        except OSError as e:
            raise OutputError(f"Could not open {self.path}: {e}") from e
        self._writer = csv.DictWriter(self._handle, fieldnames=self.columns, extrasaction="ignore")
        if not (append and exists):
            self._writer.writeheader()
        self.rows = 0

    def write(self, row: Mapping[str, Any]) -> None:
        try:
            self._writer.writerow({key: _cell(row.get(key)) for key in self.columns})
            self._handle.flush()
        except OSError as e:
            raise OutputError(f"Could not write to {self.path}: {e}") from e
        self.rows += 1

    def close(self) -> None:
        if not self._handle.closed:
            self._handle.close()


class CsvRunOutputRepository(IRunOutputRepository):
    """Plain files in a run directory"""

    def open_table(self, path: Path, columns: Sequence[str], append: bool = False) -> ITableWriter:
        return CsvTableWriter(path, columns, append)

    def write_table(
        self,
        path: Path,
        rows: Sequence[Mapping[str, Any]],
        columns: Optional[Sequence[str]] = None,
    ) -> Path:
        path = Path(path)
        if columns is None:
            columns = []
            for row in rows:
                columns.extend(key for key in row if key not in columns)
        with CsvTableWriter(path, columns) as writer:
            for row in rows:
                writer.write(row)
        logger.debug(f"📄 Wrote {len(rows)} rows to {path}")
        return path

    def read_table(self, path: Path) -> pd.DataFrame:
        path = Path(path)
        if not path.is_file():
            raise OutputError(f"Missing input file: {path}")
        try:
            return pd.read_csv(path, float_precision="round_trip")
        except pd.errors.EmptyDataError:
            return pd.DataFrame()
        except (OSError, pd.errors.ParserError) as e:
            raise OutputError(f"Could not read {path}: {e}") from e

    def write_manifest(self, path: Path, manifest: Dict[str, Any]) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
        except OSError as e:
            raise OutputError(f"Could not write manifest {path}: {e}") from e
        return path

    def read_manifest(self, path: Path) -> Dict[str, Any]:
        path = Path(path)
        if not path.is_file():
            raise OutputError(f"Missing input file: {path}")
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise OutputError(f"Could not read manifest {path}: {e}") from e

    def write_sidecar(self, path: Path, lines: List[str]) -> Path:
        sidecar = Path(path).with_suffix(".header.txt")
        try:
            sidecar.write_text("\n".join(lines) + "\n", encoding="utf-8")
        except OSError as e:
            raise OutputError(f"Could not write {sidecar}: {e}") from e
        return sidecar
