"""Run manifests: what a command read, how it was configured and what it wrote.

A manifest holds no wall-clock time, so re-running a command from its manifest with the same inputs
reproduces the manifest itself byte for byte.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable
from importlib.metadata import PackageNotFoundError
from importlib.metadata import version
from pathlib import Path
from typing import Any
from typing import Dict
from typing import List
from typing import Optional

from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import ValidationError

from prefattach import common
from prefattach.exceptions import ConfigurationError


try:
    from typing import Self
except ImportError:
    from typing_extensions import Self


logger = logging.getLogger(__name__)


def tool_version() -> str:
    try:
        return version("prefattach")
    except PackageNotFoundError:
        return "unknown"


class FileDigest(BaseModel):
    model_config = ConfigDict(frozen=True)

    path: str
    sha256: str

    @classmethod
    def of(cls, path: common.PathLike) -> Self:
        return cls(path=Path(path).as_posix(), sha256=common.sha256_file(path))

    def matches(self) -> bool:
        path = Path(self.path)
        return path.is_file() and common.sha256_file(path) == self.sha256


class RunManifest(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    command: str
    argv: List[str]  # noqa: UP006
    configuration: Dict[str, Any]  # noqa: UP006
    inputs: List[FileDigest] = []  # noqa: UP006
    seeds: Dict[str, Optional[int]] = {}  # noqa: UP006, UP007
    version: str = ""
    outputs: List[FileDigest] = []  # noqa: UP006

    @classmethod
    def build(
        cls,
        command: str,
        argv: Iterable[str],
        configuration: dict[str, Any],
        inputs: Iterable[common.PathLike] = (),
        outputs: Iterable[common.PathLike] = (),
        seeds: dict[str, int | None] | None = None,
    ) -> Self:
        return cls(
            command=command,
            argv=list(argv),
            configuration=configuration,
            inputs=[FileDigest.of(path) for path in inputs],
            seeds=seeds or {},
            version=tool_version(),
            outputs=[FileDigest.of(path) for path in sorted(outputs, key=str)],
        )

    @classmethod
    def read(cls, path: common.PathLike) -> Self:
        try:
            return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValidationError) as e:
            raise ConfigurationError(f"Cannot read run manifest {path}: {e}") from e

    def write(self, path: common.PathLike) -> Path:
        return common.write_json(path, self.model_dump(mode="json"))

    def changed_inputs(self) -> list[str]:
        """Inputs whose current content differs from the recorded digest."""
        return [digest.path for digest in self.inputs if not digest.matches()]

    def changed_outputs(self) -> list[str]:
        return [digest.path for digest in self.outputs if not digest.matches()]
