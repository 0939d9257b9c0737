"""Write the JSON-Schema documents of the output models to schemas/."""
import json
from pathlib import Path

from phmaps.logger import get_logger
from phmaps.schemas import REPORT_MODELS

logger = get_logger(__name__)

SCHEMA_DIR = Path(__file__).resolve().parent.parent / "schemas"


def main(target: Path = SCHEMA_DIR) -> list[Path]:
    """Regenerate every schema file; keys are sorted so reruns are byte-identical."""
    target.mkdir(parents=True, exist_ok=True)
    written = []
    for name, model in REPORT_MODELS.items():
        dest = target / f"{name}.schema.json"
        with open(dest, "w", encoding="utf-8") as fh:
            json.dump(model.model_json_schema(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        logger.info("Wrote %s", dest)
        written.append(dest)
    return written


if __name__ == '__main__':
    main()
