import logging
from pathlib import Path

from config import settings
from mersenne_src.errors import SketchFormatError
from mersenne_src.sketch import CountSketch

logger = logging.getLogger(__name__)

SUFFIX = ".mcsk"


class SketchStore:
    def __init__(self, sketch_dir: str):
        self.sketch_dir = Path(sketch_dir)

    def path_for(self, name: str) -> Path:
        """A bare name lives in the store directory; anything with a directory part is used as is."""
        path = Path(name)
        if path.parent == Path("."):
            path = self.sketch_dir / path
        return path if path.suffix else path.with_suffix(SUFFIX)

    def save(self, name: str, sketch: CountSketch) -> Path:
        """Write the sketch state, replacing any previous state under the same name."""
        path = self.path_for(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        data = sketch.to_bytes()
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_bytes(data)
        tmp.replace(path)
        logger.info(f"Saved sketch {sketch!r} to {path} ({len(data)} bytes)")
        return path

    def load(self, name: str) -> CountSketch:
        path = self.path_for(name)
        if not path.exists():
            raise SketchFormatError(f"no sketch state at {path}")
        try:
            sketch = CountSketch.from_bytes(path.read_bytes())
        except SketchFormatError as e:
            logger.error(f"Failed to load sketch from {path}: {e}")
            raise
        logger.info(f"Loaded sketch {sketch!r} from {path}")
        return sketch

    def names(self) -> list[str]:
        if not self.sketch_dir.is_dir():
            return []
        return sorted(p.stem for p in self.sketch_dir.glob(f"*{SUFFIX}"))


sketch_store_client = SketchStore(sketch_dir=settings.sketch_dir)
