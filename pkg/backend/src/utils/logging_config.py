"""
Module: logging_config
Description: Root logger setup for the CLI and the API service
"""

import logging
from typing import Optional

from pythonjsonlogger import jsonlogger

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_logging(level: Optional[str] = None, json_format: Optional[bool] = None) -> None:
    """
    Configure the root logger

    Args:
        level: Log level name; defaults to Settings.log_level
        json_format: Emit JSON lines; defaults to Settings.log_json
    """
    from .settings import get_settings

    settings = get_settings()
    level = (level or settings.log_level).upper()
    json_format = settings.log_json if json_format is None else json_format

    handler = logging.StreamHandler()
    if json_format:
        handler.setFormatter(jsonlogger.JsonFormatter(LOG_FORMAT))
    else:
        handler.setFormatter(logging.Formatter(LOG_FORMAT))

    root = logging.getLogger()
    for existing in list(root.handlers):
        root.removeHandler(existing)
    root.addHandler(handler)
    root.setLevel(level)
