"""
CDF export: one '#'-prefixed JSON provenance line, then CSV rows (y, mass, cdf).
"""

import json
import logging
from pathlib import Path

import pandas as pd

from src.counterfactual.cdf import CounterfactualCdf

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def cdf_frame(cdf: CounterfactualCdf) -> pd.DataFrame:
    return pd.DataFrame({"y": cdf.atoms, "mass": cdf.masses, "cdf": cdf.cumulative})


def write_cdf_csv(cdf: CounterfactualCdf, path: Path, level_name: str = "") -> Path:
    """Write a CDF with its provenance header and return the path."""
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {"level": cdf.level, "level_name": level_name, "condition": cdf.condition}
    with path.open("w", encoding="utf-8", newline="") as handle:
        handle.write("# " + json.dumps(header, sort_keys=True) + "\n")
        cdf_frame(cdf).to_csv(
            handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
        )
    logger.info(f"Wrote CDF with {cdf.atoms.size} atoms to {path}")
    return path


def read_cdf_csv(path: Path) -> tuple[dict[str, object], pd.DataFrame]:
    """Read a file written by write_cdf_csv."""
    with path.open(encoding="utf-8") as handle:
        first = handle.readline()
    header = json.loads(first[1:].strip()) if first.startswith("#") else {}
    frame = pd.read_csv(path, comment="#")
    return header, frame
