import logging
import os
from pathlib import Path
from typing import Dict, Iterable, Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

_PROJECT_ROOT = Path(__file__).resolve().parent.parent


def _default_dirs() -> list:
    return [Path.cwd(), Path(__file__).parent, _PROJECT_ROOT]


def _read_pairs(path: Path) -> Dict[str, str]:
    pairs = {}
    for raw_line in path.read_text(encoding="utf-8").splitlines():
        line = raw_line.strip()
        if line.startswith("export "):
            line = line[len("export "):]
        if not line or line.startswith("#") or "=" not in line:
            continue
        key, value = line.split("=", 1)
        key = key.strip()
        if key:
            pairs[key] = value.strip().strip('"').strip("'")
    return pairs


def load_dotenv_if_present(search_dirs: Optional[Iterable[Path]] = None) -> Optional[Path]:
    """Load RELAYCAST_* defaults from the first `.env` found.

    Looks in the working directory, the package and the project root unless
    ``search_dirs`` is given. Variables already in the environment are kept.
    Returns the file that was read, or None.
    """
    dirs = [Path(d) for d in search_dirs] if search_dirs is not None else _default_dirs()
    target = next((d / ".env" for d in dirs if (d / ".env").is_file()), None)
    if target is None:
        return None

    try:
        load_dotenv(dotenv_path=target, override=False)
        logger.debug("loaded %s", target)
        return target
    except Exception:  # noqa: BLE001
        logger.debug("python-dotenv could not read %s, using the plain parser", target)

    try:
        for key, value in _read_pairs(target).items():
            os.environ.setdefault(key, value)
    except OSError as exc:
        logger.warning("Failed to read %s: %s", target, exc)
        return None
    return target
