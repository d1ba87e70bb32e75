"""
📈 Figure Service
Matplotlib SVG renderings of report tables
"""
from pathlib import Path
from typing import Mapping, Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
from loguru import logger  # noqa: E402

from ...application.interfaces import IFigureRenderer  # noqa: E402
from ...domain.errors import OutputError  # noqa: E402


class MatplotlibFigureRenderer(IFigureRenderer):
    """Line plots written as SVG"""

    def __init__(self, width: float = 6.0, height: float = 4.0):
        self.size = (width, height)

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
        columns = [c for c in columns if c in frame.columns]
        if frame.empty or x not in frame.columns or not columns:
            logger.debug(f"📈 Nothing to draw for {path}")
            return None

        path = Path(path).with_suffix(".svg")
        styles = styles or {}
        fig, ax = plt.subplots(figsize=self.size)
        try:
            xs = frame[x].to_numpy(dtype=float)
            for column in columns:
                ys = frame[column].to_numpy(dtype=float)
                keep = np.isfinite(xs) & np.isfinite(ys)
                if logx:
                    keep &= xs > 0
                if logy:
                    keep &= ys > 0
                if not keep.any():
                    continue
                ax.plot(xs[keep], ys[keep], styles.get(column, "-"), label=column, linewidth=1.2)
            if logx:
                ax.set_xscale("log")
            if logy:
                ax.set_yscale("log")
            ax.set_xlabel(x)
            if title:
                ax.set_title(title)
            if len(columns) > 1:
                ax.legend(fontsize="small")
            fig.tight_layout()
            fig.savefig(path, format="svg")
        except (OSError, ValueError) as e:
            raise OutputError(f"Could not render {path}: {e}") from e
        finally:
            plt.close(fig)
        return path
