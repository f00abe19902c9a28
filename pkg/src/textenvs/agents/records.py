"""Per-seed training trajectory, serialized as CSV with a fixed schema."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

CSV_HEADER = "step,mean_return,eval_score"


@dataclass
class RunRecord:
    """Rows of (env step, trailing-100-episode mean return, optional eval score)."""

    seed: int = 0
    rows: list[tuple[int, float, float | None]] = field(default_factory=list)

    def log(self, step: int, mean_return: float, eval_score: float | None = None) -> None:
        self.rows.append((int(step), float(mean_return), eval_score))

    def to_csv(self) -> str:
        # x column is env steps, not episodes
        out = io.StringIO()
        out.write(CSV_HEADER + "\n")
        for step, mean_return, eval_score in self.rows:
            score = "" if eval_score is None else repr(float(eval_score))
            out.write(f"{step},{mean_return!r},{score}\n")
        return out.getvalue()

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")

    @classmethod
    def from_csv(cls, text: str, seed: int = 0) -> "RunRecord":
        record = cls(seed=seed)
        lines = text.strip().splitlines()
        if not lines or lines[0] != CSV_HEADER:
            raise ValueError(f"expected header {CSV_HEADER!r}")
        for line in lines[1:]:
            step, mean_return, eval_score = line.split(",")
            record.rows.append(
                (int(step), float(mean_return), float(eval_score) if eval_score else None)
            )
        return record

    @classmethod
    def load(cls, path: str | Path, seed: int = 0) -> "RunRecord":
        return cls.from_csv(Path(path).read_text(encoding="utf-8"), seed=seed)

    def final_mean_return(self) -> float:
        return self.rows[-1][1] if self.rows else 0.0

    def best_mean_return(self) -> float:
        return max((row[1] for row in self.rows), default=0.0)
