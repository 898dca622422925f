"""Random FEM-labelled samples for the surrogate, streamed to a CSV file."""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from itertools import count, islice
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from ..case import LoadKind, PlateCase, Problem
from ..material import Gradation, ThicknessKind
from ..parallel import worker_count
from ..solver import SolverError, analyze

log = logging.getLogger(__name__)

PROBLEMS = tuple(p.value for p in Problem)
BOUNDARIES = ("CCCC", "SSSS", "CFCF", "SFSF", "CSCS")
PLATE_TYPES = (1, 2, 3)
DEFAULT_DATASET_MESH = 16


@dataclass(frozen=True)
class Sample:
    problem: str
    bc: str
    kx: float
    ky: float
    kz: float
    kw_bar: float
    plate_type: int
    a_over_h0: float
    target: float = float("nan")

    def to_case(self) -> PlateCase:
        return PlateCase.from_ratio(
            self.a_over_h0,
            thickness_kind=ThicknessKind(int(self.plate_type)),
            gradation=Gradation(self.kx, self.ky, self.kz),
            bc=self.bc,
            problem=Problem(self.problem),
            kw_bar=self.kw_bar,
            load=LoadKind.SINUSOIDAL,
        )

    def descriptor(self) -> dict:
        d = asdict(self)
        d.pop("target")
        return d


FIELDS = tuple(f.name for f in fields(Sample))


@dataclass(frozen=True)
class SamplingRanges:
    k_max: float = 10.0
    k_grid: tuple = (0.0, 1.0, 2.0, 4.0, 5.0, 6.0, 8.0, 10.0)
    p_grid: float = 0.5  # probability an index is drawn from k_grid
    a_over_h0: tuple = (5.0, 10.0, 20.0, 50.0, 100.0)
    p_no_foundation: float = 0.25
    kw_log_range: tuple = (1.0, 1000.0)
    problems: tuple = PROBLEMS
    boundaries: tuple = BOUNDARIES
    plate_types: tuple = PLATE_TYPES
    extra: dict = field(default_factory=dict)


def draw_descriptor(rng: np.random.Generator, ranges: SamplingRanges) -> Sample:
    def index():
        if rng.random() < ranges.p_grid:
            return float(rng.choice(ranges.k_grid))
        return float(rng.uniform(0.0, ranges.k_max))

    problem = str(rng.choice(ranges.problems))
    bc = str(rng.choice(ranges.boundaries))
    kx, ky, kz = index(), index(), index()
    if rng.random() < ranges.p_no_foundation:
        kw = 0.0
    else:
        lo, hi = np.log(ranges.kw_log_range)
        kw = float(np.exp(rng.uniform(lo, hi)))
    plate_type = int(rng.choice(ranges.plate_types))
    a_over_h0 = float(rng.choice(ranges.a_over_h0))
    return Sample(problem, bc, kx, ky, kz, kw, plate_type, a_over_h0)


def label(sample: Sample, mesh: int = DEFAULT_DATASET_MESH) -> Sample:
    value = analyze(sample.to_case(), n=mesh).nondimensional
    return Sample(**{**sample.descriptor(), "target": float(value)})


def _job(args):
    seed, index, ranges, mesh = args
    rng = np.random.default_rng([seed, index])
    sample = draw_descriptor(rng, ranges)
    try:
        return label(sample, mesh)
    except (SolverError, ValueError, np.linalg.LinAlgError) as exc:
        log.warning("sample %d skipped (%s): %s", index, exc, sample.descriptor())
        return None


def iter_samples(seed: int, ranges: SamplingRanges | None = None, mesh: int = DEFAULT_DATASET_MESH,
                 workers: int | None = None) -> Iterator[Sample]:
    """Endless stream of labelled samples in index order (failures skipped)."""
    ranges = ranges or SamplingRanges()
    workers = workers or worker_count()
    jobs = ((seed, i, ranges, mesh) for i in count())
    if workers == 1:
        results = map(_job, jobs)
        yield from (s for s in results if s is not None)
        return
    with ProcessPoolExecutor(workers) as pool:
        while True:
            chunk = list(islice(jobs, 64 * workers))
            for s in pool.map(_job, chunk, chunksize=8):
                if s is not None:
                    yield s


def generate_dataset(n: int, ranges: SamplingRanges | None = None, seed: int = 0,
                     path: str | Path | None = None, mesh: int = DEFAULT_DATASET_MESH,
                     workers: int | None = None, progress: bool = False) -> list[Sample]:
    """Draw and label ``n`` samples; if ``path`` is given they stream to it."""
    stream = islice(iter_samples(seed, ranges, mesh, workers), n)
    if progress:
        from tqdm import tqdm

        stream = tqdm(stream, total=n, desc="dataset")
    out = []
    if path is None:
        return list(stream)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(FIELDS)
        for s in stream:
            writer.writerow(_row(s))
            fh.flush()
            out.append(s)
    return out


def _row(s: Sample) -> list[str]:
    return [s.problem, s.bc, repr(s.kx), repr(s.ky), repr(s.kz), repr(s.kw_bar),
            str(s.plate_type), repr(s.a_over_h0), repr(s.target)]


def write_dataset(samples: Iterable[Sample], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(FIELDS)
        writer.writerows(_row(s) for s in samples)


def read_dataset(path: str | Path) -> list[Sample]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != FIELDS:
            raise ValueError(f"{path}: expected columns {FIELDS}, got {reader.fieldnames}")
        return [
            Sample(r["problem"], r["bc"], float(r["kx"]), float(r["ky"]), float(r["kz"]),
                   float(r["kw_bar"]), int(r["plate_type"]), float(r["a_over_h0"]), float(r["target"]))
            for r in reader
        ]
