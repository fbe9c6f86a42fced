# -*- coding: utf-8 -*-
# -----------------------------------------------------------------------------
# Version: 1.0
# Date: October 2026
# License: GNU Affero General Public License v3.0 (AGPL-3.0)
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU Affero General Public License as published
# by the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the
# GNU Affero General Public License for more details.
#
# You should have received a copy of the GNU Affero General Public License
# along with this program. If not, see <https://www.gnu.org/licenses/>.
# -----------------------------------------------------------------------------

import datetime
import logging
import os
import tempfile

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import pandas as pd
import yaml

from pilot_beam_tool import __version__


logger = logging.getLogger(__name__)


# Environment variable giving the default output directory
OUTPUT_ENV_VAR = "PILOT_BEAM_OUT"
DEFAULT_OUTPUT_DIR = "results"



@dataclass
class OutputData:
    """
    Where the files of a command are written.

    Attributes:
        output_dir (str): The output directory; taken from `PILOT_BEAM_OUT` (or `results`) when empty.
        run_name (str): The stem of the files, e.g., the preset name.
    """

    output_dir: str
    run_name: str


    def get_output_dir(self) -> str:
        """The output directory, created if missing."""
        path = self.output_dir or os.environ.get(OUTPUT_ENV_VAR, "") or DEFAULT_OUTPUT_DIR
        os.makedirs(path, exist_ok=True)
        return path


    def get_results_path(self) -> str:
        return os.path.join(self.get_output_dir(), f"{self.run_name}.csv")


    def get_trace_path(self, policy: str) -> str:
        safe = "".join(c if c.isalnum() or c in "-_" else "_" for c in policy)
        return os.path.join(self.get_output_dir(), f"{self.run_name}_trace_{safe}.csv")


    def get_manifest_path(self) -> str:
        return os.path.join(self.get_output_dir(), f"{self.run_name}_manifest.yaml")



@dataclass
class RunManifest:
    """The record written next to the results: everything needed to reproduce them exactly."""

    command: str
    seed: int
    configs: Dict[str, Dict[str, Any]]     # The resolved configuration of every experiment, by name
    outputs: List[str] = field(default_factory=list)
    version: str = __version__
    timestamp: str = field(default_factory=lambda: datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"))


    def to_yaml(self) -> str:
        return yaml.safe_dump(asdict(self), sort_keys=False, default_flow_style=False)


    def write(self, path: str) -> None:
        write_text_atomic(path, self.to_yaml())
        logger.info(f"Manifest written to `{path}`.")



def write_text_atomic(path: str, text: str) -> None:
    """Write `text` to a temporary file of the same directory and move it over `path`."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp_", suffix=os.path.splitext(path)[1])
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def frame_to_csv(frame: pd.DataFrame) -> str:
    """
    Render a table as CSV text with stable formatting.

    Float columns use the shortest decimal that round-trips (`repr`), lines end with `\\n`.
    """

    rendered = frame.copy()
    for column in rendered.columns:
        if pd.api.types.is_float_dtype(rendered[column]):
            rendered[column] = rendered[column].map(lambda x: repr(float(x)))
    return rendered.to_csv(index=False, lineterminator="\n")


def write_csv(frame: pd.DataFrame, path: str, manifest: Optional[RunManifest] = None) -> None:
    """Atomically write `frame` to `path`, recording the path in `manifest`."""
    write_text_atomic(path, frame_to_csv(frame))
    if manifest is not None:
        manifest.outputs.append(path)
    logger.info(f"{len(frame)} rows written to `{path}`.")
