"""
📝 Logger Configuration
Loguru configuration
"""
import sys
from typing import Optional

from loguru import logger

from ...config.settings import get_settings


def setup_logging(level: Optional[str] = None, file_path: Optional[str] = None):
    """Setup loguru logging; explicit arguments override the settings"""
    settings = get_settings().logging
    level = (level or settings.level).upper()
    file_path = settings.file_path if file_path is None else file_path

    # Remove default logger
    logger.remove()

    # Console logger on stderr so stdout stays clean for tables
    logger.add(
        sys.stderr,
        format=settings.format,
        level=level,
        colorize=True
    )

    if file_path:
        logger.add(
            file_path,
            format=settings.format,
            level=level,
            rotation=settings.max_file_size,
            retention=settings.backup_count
        )

    logger.debug("📝 Logging configured")
