import logging
from pathlib import Path

import mlp
from errors import InputFileError, LateralScanError
from mlp import MlpModel

logger = logging.getLogger(__name__)


def save_model(model: MlpModel, path: str | Path, header: list[str] | None = None) -> Path:
    """Write the model file, preceded by '#' comment lines."""
    path = Path(path)
    text = mlp.serialize(model)
    comments = "".join(f"# {line}\n" for line in header or [])
    try:
        path.write_text(comments + text, encoding="ascii")
    except OSError as e:
        raise LateralScanError(f"Cannot write model to {path}: {e.strerror or e}", stage="output") from e
    logger.info("Saved %s model %s to %s", model.architecture, model.model_id, path)
    return path


def load_model(path: str | Path) -> MlpModel:
    path = Path(path)
    try:
        text = path.read_text(encoding="ascii", errors="replace")
    except OSError as e:
        raise InputFileError(f"Cannot read model {path}: {e.strerror or e}") from e
    model = mlp.deserialize(text)
    logger.debug("Loaded %s model %s from %s", model.architecture, model.model_id, path)
    return model
