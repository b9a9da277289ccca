"""Commutativity checking for numerical reducer programs via streaming numerical transducers."""
from importlib import resources
from pathlib import Path

__version__ = "0.1.0"


def corpus_path(name: str = "") -> Path:
    """Path to the bundled example corpus, or to one file in it."""
    base = Path(str(resources.files(__name__) / "corpus"))
    return base / name if name else base
