"""
🔌 Application Interfaces
Storage and rendering ports used by the run, report and bounds use cases
"""
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

import pandas as pd

from ..domain.entities import Checkpoint


class ICheckpointRepository(ABC):
    """Binary checkpoint storage"""

    @abstractmethod
    def encode(self, checkpoint: Checkpoint) -> bytes:
        """Serialize a checkpoint"""
        pass

    @abstractmethod
    def decode(self, payload: bytes) -> Checkpoint:
        """Rebuild a checkpoint; malformed payloads raise ContractViolation"""
        pass

    @abstractmethod
    def save(self, checkpoint: Checkpoint, path: Path) -> Path:
        """Write atomically"""
        pass

    @abstractmethod
    def load(self, path: Path) -> Checkpoint:
        """Read a checkpoint file"""
        pass


class ITableWriter(ABC):
    """Row-at-a-time writer of one CSV table"""

    @abstractmethod
    def write(self, row: Mapping[str, Any]) -> None:
        pass

    @abstractmethod
    def close(self) -> None:
        pass

    def __enter__(self) -> "ITableWriter":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.close()


class IRunOutputRepository(ABC):
    """Tables and manifest of one run directory"""

    @abstractmethod
    def open_table(self, path: Path, columns: Sequence[str], append: bool = False) -> ITableWriter:
        """Open a CSV with a fixed column order"""
        pass

    @abstractmethod
    def write_table(self, path: Path, rows: Sequence[Mapping[str, Any]], columns: Optional[Sequence[str]] = None) -> Path:
        """Write a whole CSV at once"""
        pass

    @abstractmethod
    def read_table(self, path: Path) -> pd.DataFrame:
        """Read a CSV; a missing file raises OutputError naming it"""
        pass

    @abstractmethod
    def write_manifest(self, path: Path, manifest: Dict[str, Any]) -> Path:
        pass

    @abstractmethod
    def read_manifest(self, path: Path) -> Dict[str, Any]:
        pass

    @abstractmethod
    def write_sidecar(self, path: Path, lines: List[str]) -> Path:
        """Column documentation next to a data file"""
        pass


class IFigureRenderer(ABC):
    """Optional vector renderings of report data"""

    @abstractmethod
    def render(
        self,
        frame: pd.DataFrame,
        x: str,
        columns: Sequence[str],
        path: Path,
        title: str = "",
        logx: bool = False,
        logy: bool = False,
        styles: Optional[Mapping[str, str]] = None,
    ) -> Optional[Path]:
        """Draw the columns against x; None when nothing was drawn"""
        pass
