"""

Copyright (c) 2026 evotrain developers

SPDX-License-Identifier: MIT

"""

import contextlib
import io
import os
import tempfile
from dataclasses import astuple, dataclass, fields
from pathlib import Path

import pandas as pd
import yaml

CSV_SCHEMA = "evotrain-records"
CSV_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunRecord:
    """Metrics of one run after one epoch."""
    run_id: int
    seed: int
    solver: str
    schedule: str
    epoch: int
    train_loss: float
    train_acc: float
    test_loss: float
    test_acc: float
    evals_cumulative: int
    wall_ms: int


RECORD_FIELDS = tuple(f.name for f in fields(RunRecord))
METRICS = ('train_loss', 'train_acc', 'test_loss', 'test_acc')


def records_to_frame(records):
    return pd.DataFrame([astuple(r) for r in records], columns=list(RECORD_FIELDS))


def frame_to_records(frame):
    missing = set(RECORD_FIELDS) - set(frame.columns)
    if missing:
        raise ValueError(f"record table is missing columns {sorted(missing)}")
    frame = frame.fillna({'schedule': ''})
    return [
        RunRecord(
            run_id=int(row.run_id),
            seed=int(row.seed),
            solver=str(row.solver),
            schedule=str(row.schedule),
            epoch=int(row.epoch),
            train_loss=float(row.train_loss),
            train_acc=float(row.train_acc),
            test_loss=float(row.test_loss),
            test_acc=float(row.test_acc),
            evals_cumulative=int(row.evals_cumulative),
            wall_ms=int(row.wall_ms),
        )
        for row in frame.itertuples(index=False)
    ]


@contextlib.contextmanager
def atomic_write(path, mode='w'):
    """Write to a temporary sibling and rename over ``path`` on success."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode) as f:
            yield f
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def config_preamble(config=None, kind="records"):
    lines = [f"# {CSV_SCHEMA} v{CSV_SCHEMA_VERSION} {kind}"]
    if config is not None:
        text = yaml.safe_dump(config, sort_keys=True, default_flow_style=False)
        lines.extend(f"# {line}" for line in text.rstrip("\n").split("\n"))
    return "\n".join(lines) + "\n"


def frame_to_csv_text(frame, config=None, kind="records"):
    buf = io.StringIO()
    buf.write(config_preamble(config, kind))
    frame.to_csv(buf, index=False, lineterminator="\n", float_format="%.17g", na_rep="nan")
    return buf.getvalue()


def write_frame_csv(frame, path, config=None, kind="records"):
    text = frame_to_csv_text(frame, config, kind)
    with atomic_write(path) as f:
        f.write(text)


def write_records_csv(records, path, config=None):
    write_frame_csv(records_to_frame(records), path, config)


def read_records_csv(paths):
    if isinstance(paths, (str, Path)):
        paths = [paths]
    frames = [pd.read_csv(p, comment='#', keep_default_na=False, na_values=["nan"],
        float_precision='round_trip') for p in paths]
    return frame_to_records(pd.concat(frames, ignore_index=True))
