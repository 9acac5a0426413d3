"""
Run directories and JSON summaries.
"""

import json
import logging
import shutil
from datetime import datetime
from pathlib import Path
from typing import Any, Union

logger = logging.getLogger(__name__)


def make_run_dir(base: Union[str, Path], name: str, overwrite: bool = False) -> Path:
    """
    Fresh output directory for one command invocation.

    Without overwrite a timestamped subdirectory `<name>_<YYYYmmdd-HHMMSS>` is
    created (suffixed with a counter when it already exists); with overwrite the
    plain `<base>/<name>` directory is emptied and reused.
    """
    base = Path(base)
    if overwrite:
        run_dir = base / name
        if run_dir.exists():
            shutil.rmtree(run_dir)
    else:
        stamp = datetime.now().strftime("%Y%m%d-%H%M%S")
        run_dir = base / f"{name}_{stamp}"
        counter = 1
        while run_dir.exists():
            run_dir = base / f"{name}_{stamp}_{counter}"
            counter += 1
    run_dir.mkdir(parents=True)
    logger.info("Writing outputs to %s", run_dir)
    return run_dir


def write_json(path: Union[str, Path], payload: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, ensure_ascii=False)
    return path
