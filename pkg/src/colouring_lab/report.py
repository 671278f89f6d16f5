import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any

from .loader import dump_json
from .models import as_json_ready
from .schemas import ExperimentConfig

try:
    import pandas as pd

    HAS_PANDAS = True
except ImportError:
    HAS_PANDAS = False

logger = logging.getLogger(__name__)


def _version_of(package: str) -> str:
    try:
        return version(package)
    except PackageNotFoundError:
        return "unknown"


def module_versions() -> dict[str, str]:
    return {name: _version_of(name) for name in ("colouring-lab", "numpy", "scipy", "pydantic")}


@dataclass(frozen=True)
class Assertion:
    name: str
    passed: bool
    detail: str = ""

    @property
    def json(self) -> dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class Report:
    """
    Accumulates the results and pass/fail assertions of one CLI run.

    The JSON form holds no timestamp, so identical configurations give
    byte-identical reports; run metadata goes to a sidecar via `write`.
    """

    config: ExperimentConfig
    results: dict[str, Any] = field(default_factory=dict)
    assertions: list[Assertion] = field(default_factory=list)
    rows: list[dict[str, Any]] = field(default_factory=list)

    def check(self, name: str, passed: bool, detail: str = "") -> bool:
        self.assertions.append(Assertion(name, bool(passed), detail))
        if not passed:
            logger.warning("Assertion failed: %s %s", name, detail)
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    @property
    def json(self) -> dict[str, Any]:
        return as_json_ready(
            {
                "command": self.config.command,
                "seed": self.config.seed,
                "config": self.config.json,
                "versions": module_versions(),
                "results": self.results,
                "assertions": [a.json for a in self.assertions],
                "passed": self.passed,
            }
        )

    def to_text(self) -> str:
        lines = [f"{self.config.command} (seed {self.config.seed})"]
        for a in self.assertions:
            mark = "PASS" if a.passed else "FAIL"
            lines.append(f"  [{mark}] {a.name}" + (f": {a.detail}" if a.detail else ""))
        lines.append("passed" if self.passed else "FAILED")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        """
        Tabular rows (for example per-coupon Monte Carlo frequencies) as CSV.

        Raises:
            ImportError: If pandas is not installed.
            ValueError: If the run produced no tabular rows.
        """
        if not HAS_PANDAS:
            raise ImportError("CSV output requires pandas; install colouring-lab[csv]")
        if not self.rows:
            raise ValueError(f"'{self.config.command}' produces no tabular rows for CSV output")
        return pd.DataFrame(self.rows).to_csv(index=False)

    def render(self) -> str:
        fmt = self.config.output_format
        if fmt == "text":
            return self.to_text()
        if fmt == "csv":
            return self.to_csv()
        return dump_json(self.json)

    def write(self, out: str | Path) -> None:
        """
        Writes the rendered report to `out` and run metadata to `<out>.meta.json`.
        """
        path = Path(out)
        path.write_text(self.render(), encoding="utf-8")
        meta = {
            "written_at": datetime.now(timezone.utc).isoformat(),
            "report": path.name,
        }
        Path(f"{path}.meta.json").write_text(dump_json(meta), encoding="utf-8")
        logger.info("Report written to %s", path)
