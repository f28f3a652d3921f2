"""Rectangular ``(x, p)`` sweeps of the information gain and their output files."""

from __future__ import annotations

import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator

import numpy as np

from . import __version__
from .distinguish import GainRecord, information_gain
from .eig import DEFAULT_TOL
from .fock import PAPER_DIM, CoherentEnsemble, suggest_dim

CSV_COLUMNS = ("x", "p", "pe_pure", "pe_mixed", "i_pure", "i_mixed", "i_gain")


class CellError(RuntimeError):
    def __init__(self, x: float, p: float, cause: Exception):
        super().__init__(f"cell (x={x!r}, p={p!r}) failed: {cause}")
        self.x = x
        self.p = p
        self.cause = cause


@dataclass(frozen=True)
class GridSpec:
    # Default region: positive quadrant, enough for the rise and the flat plateau.
    x_min: float = 0.0
    x_max: float = 3.0
    x_steps: int = 61
    p_min: float = 0.0
    p_max: float = 3.0
    p_steps: int = 61
    dim: int | None = PAPER_DIM
    auto_tol: float | None = None
    eig_tol: float = DEFAULT_TOL

    def __post_init__(self) -> None:
        for name in ("x_min", "x_max", "p_min", "p_max", "eig_tol"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.x_min > self.x_max or self.p_min > self.p_max:
            raise ValueError("range minimum exceeds maximum")
        if self.x_steps < 1 or self.p_steps < 1:
            raise ValueError("grid needs at least one step per axis")
        if self.x_steps == 1 and self.x_min != self.x_max or self.p_steps == 1 and self.p_min != self.p_max:
            raise ValueError("a single-step axis needs min == max")
        if (self.dim is None) == (self.auto_tol is None):
            raise ValueError("give exactly one of a fixed dim or an automatic tail tolerance")
        if self.dim is not None and self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if self.auto_tol is not None and not 0.0 < self.auto_tol < 1.0:
            raise ValueError(f"auto tail tolerance must lie in (0, 1), got {self.auto_tol}")
        if not self.eig_tol > 0.0:
            raise ValueError("eig_tol must be positive")

    @property
    def cell_count(self) -> int:
        return self.x_steps * self.p_steps

    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.x_steps)

    def ps(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.p_steps)

    def cells(self) -> Iterator[tuple[float, float]]:
        """Row-major, ``p`` varying fastest."""
        ps = self.ps()
        for x in self.xs():
            for p in ps:
                yield float(x), float(p)

    def resolve_dim(self) -> int:
        if self.dim is not None:
            return self.dim
        # Norm deficits grow with |alpha|, and every component of every
        # cell has |alpha|^2 = x^2 + p^2, so the largest corner decides.
        x = max(abs(self.x_min), abs(self.x_max))
        p = max(abs(self.p_min), abs(self.p_max))
        return suggest_dim([CoherentEnsemble.pure(x, p)], self.auto_tol)


@dataclass(frozen=True)
class RunManifest:
    spec: GridSpec
    dim_used: int
    tool_version: str
    cell_count: int
    started_at: str | None = None
    finished_at: str | None = None

    def to_dict(self, timestamps: bool = True) -> dict:
        out = {
            "spec": asdict(self.spec),
            "dim_used": self.dim_used,
            "tool_version": self.tool_version,
            "cell_count": self.cell_count,
        }
        if timestamps:
            out["started_at"] = self.started_at
            out["finished_at"] = self.finished_at
        return out


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def run_grid(spec: GridSpec, jobs: int = 1) -> tuple[list[GainRecord], RunManifest]:
    """Evaluate every cell; rows come back in cell order whatever ``jobs`` is."""
    if jobs < 1:
        raise ValueError(f"jobs must be at least 1, got {jobs}")
    started = _now()
    dim = spec.resolve_dim()

    def cell(xp: tuple[float, float]) -> GainRecord:
        x, p = xp
        try:
            return information_gain(x, p, dim=dim, tol=spec.eig_tol)
        except Exception as exc:
            raise CellError(x, p, exc) from exc

    cells = list(spec.cells())
    if jobs == 1:
        rows = [cell(xp) for xp in cells]
    else:
        # The eigensolver releases the GIL, so threads run cells concurrently;
        # Executor.map yields results in submission order.
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(cell, cells))
    manifest = RunManifest(
        spec=spec,
        dim_used=dim,
        tool_version=__version__,
        cell_count=len(rows),
        started_at=started,
        finished_at=_now(),
    )
    return rows, manifest


def format_float(v: float) -> str:
    return format(v, ".17g")


def rows_to_csv(rows: list[GainRecord]) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for r in rows:
        buf.write(",".join(format_float(getattr(r, c)) for c in CSV_COLUMNS) + "\n")
    return buf.getvalue()


def rows_to_json(rows: list[GainRecord], manifest: RunManifest) -> str:
    payload = {
        "manifest": manifest.to_dict(timestamps=False),
        "rows": [asdict(r) for r in rows],
    }
    return json.dumps(payload, indent=2) + "\n"


def read_csv(path: str | Path) -> list[GainRecord]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != ",".join(CSV_COLUMNS):
        raise ValueError(f"{path}: unexpected header")
    return [GainRecord(*map(float, line.split(","))) for line in lines[1:]]


def manifest_path(out: str | Path) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".manifest.json")


def write_grid(rows: list[GainRecord], manifest: RunManifest, out: str | Path, fmt: str = "csv") -> Path:
    """Write the data file and its ``<out>.manifest.json`` sidecar; returns the sidecar path."""
    if fmt == "csv":
        text = rows_to_csv(rows)
    elif fmt == "json":
        text = rows_to_json(rows, manifest)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    out = Path(out)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    side = manifest_path(out)
    with open(side, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest.to_dict(), fh, indent=2)
        fh.write("\n")
    return side
