import logging
import os
from typing import Optional

from dotenv import load_dotenv

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"


def configure_logging(level: Optional[str] = None) -> None:
    """Configure root logging once for CLI runs.

    Args:
        level (str): Log level name. Defaults to ``Z3LGT_LOG_LEVEL`` or INFO.
    """
    load_dotenv()
    level = (level or os.getenv("Z3LGT_LOG_LEVEL", "INFO")).upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT)
    # matplotlib's font manager is chatty at INFO
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
