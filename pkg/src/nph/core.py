"""Two-arm survival datasets, event tables, and Kaplan-Meier estimation.

Conventions used throughout the package:

* tied events and censorings at the same time are resolved as events first
  (a subject censored at t is still at risk for an event at t);
* times are exact reals, never rounded or binned;
* exactly two arms, labelled control and treatment.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import (
    DatasetFormatError,
    EmptyArmError,
    NegativeTimeError,
    NoEventsError,
)

CSV_HEADER = ("id", "time", "status", "arm")


class Arm(Enum):
    CONTROL = "control"
    TREATMENT = "treatment"


@dataclass(frozen=True)
class Observation:
    """One subject: follow-up time, event indicator (1=event, 0=censored), arm."""

    time: float
    status: int
    arm: Arm


@dataclass(frozen=True)
class Dataset:
    """A validated two-arm dataset held as column arrays.

    Construct via :func:`validate_dataset` or :meth:`from_arrays`; both
    enforce the dataset contract (non-negative times, binary status, both
    arms present, at least one event).
    """

    time: np.ndarray
    status: np.ndarray
    treat: np.ndarray  # True = treatment arm

    @classmethod
    def from_arrays(cls, time, status, treat) -> "Dataset":
        time = np.asarray(time, dtype=float)
        status = np.asarray(status)
        treat = np.asarray(treat, dtype=bool)
        if time.ndim != 1 or time.shape != status.shape or time.shape != treat.shape:
            raise ValueError("time, status and treat must be 1-d arrays of equal length")
        if time.size == 0:
            raise DatasetFormatError("dataset is empty")
        if not np.all(np.isfinite(time)):
            raise DatasetFormatError("non-finite follow-up time")
        if np.any(time < 0):
            raise NegativeTimeError("follow-up times must be non-negative")
        if not np.all(np.isin(status, (0, 1))):
            raise DatasetFormatError("status must be 0 (censored) or 1 (event)")
        status = status.astype(np.int8)
        n_treat = int(treat.sum())
        if n_treat == 0:
            raise EmptyArmError("treatment arm has no subjects")
        if n_treat == time.size:
            raise EmptyArmError("control arm has no subjects")
        if int(status.sum()) == 0:
            raise NoEventsError("all subjects are censored")
        return cls(time=time, status=status, treat=treat)

    @property
    def n(self) -> int:
        return int(self.time.size)

    def observations(self) -> Iterator[Observation]:
        for t, s, x in zip(self.time, self.status, self.treat):
            arm = Arm.TREATMENT if x else Arm.CONTROL
            yield Observation(float(t), int(s), arm)

    def subset(self, mask: np.ndarray) -> "Dataset":
        """Unvalidated row subset (used for per-arm curves)."""
        return Dataset(self.time[mask], self.status[mask], self.treat[mask])


def validate_dataset(observations: Iterable[Observation] | Dataset) -> Dataset:
    """Validate a collection of observations into a :class:`Dataset`.

    Raises :class:`NegativeTimeError`, :class:`EmptyArmError` or
    :class:`NoEventsError` when the data cannot support a two-sample test.
    """
    if isinstance(observations, Dataset):
        return Dataset.from_arrays(observations.time, observations.status, observations.treat)
    obs = list(observations)
    if not obs:
        raise DatasetFormatError("dataset is empty")
    time = np.array([o.time for o in obs], dtype=float)
    status = np.array([o.status for o in obs])
    treat = np.array([o.arm is Arm.TREATMENT for o in obs], dtype=bool)
    return Dataset.from_arrays(time, status, treat)


@dataclass(frozen=True)
class EventTable:
    """Per distinct event time: event and at-risk counts by arm.

    ``d1``/``n1`` refer to the treatment arm and ``d2``/``n2`` to control.
    At-risk counts are subjects with follow-up time >= the event time, so a
    subject censored exactly at an event time still counts as at risk there.
    """

    time: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    n1: np.ndarray
    n2: np.ndarray

    @property
    def d(self) -> np.ndarray:
        return self.d1 + self.d2

    @property
    def n(self) -> np.ndarray:
        return self.n1 + self.n2

    def __len__(self) -> int:
        return int(self.time.size)


def build_event_table(dataset: Dataset) -> EventTable:
    """Tabulate distinct event times with per-arm event and at-risk counts."""
    event_mask = dataset.status == 1
    times = np.unique(dataset.time[event_mask])

    treat_times = np.sort(dataset.time[dataset.treat])
    control_times = np.sort(dataset.time[~dataset.treat])
    n1 = treat_times.size - np.searchsorted(treat_times, times, side="left")
    n2 = control_times.size - np.searchsorted(control_times, times, side="left")

    treat_events = np.sort(dataset.time[event_mask & dataset.treat])
    control_events = np.sort(dataset.time[event_mask & ~dataset.treat])
    d1 = np.searchsorted(treat_events, times, side="right") - np.searchsorted(
        treat_events, times, side="left"
    )
    d2 = np.searchsorted(control_events, times, side="right") - np.searchsorted(
        control_events, times, side="left"
    )
    return EventTable(time=times, d1=d1, d2=d2, n1=n1, n2=n2)


@dataclass(frozen=True)
class SurvivalCurve:
    """Right-continuous Kaplan-Meier step function.

    ``times`` are the jump (event) times in strictly increasing order and
    ``values`` the survival probabilities just after each jump.  The curve
    is 1 before the first jump.
    """

    times: np.ndarray
    values: np.ndarray

    def eval(self, t):
        """Value at t (right-continuous)."""
        idx = np.searchsorted(self.times, t, side="right") - 1
        return np.where(idx < 0, 1.0, self.values[np.maximum(idx, 0)])[()]

    def eval_left(self, t):
        """Left limit S(t-): the value just before t."""
        idx = np.searchsorted(self.times, t, side="left") - 1
        return np.where(idx < 0, 1.0, self.values[np.maximum(idx, 0)])[()]


def km_estimate(dataset: Dataset, pooled: bool = True):
    """Kaplan-Meier product-limit estimate.

    With ``pooled=True`` (the default, and the form the weighted tests
    need) arm labels are ignored and a single :class:`SurvivalCurve` is
    returned.  With ``pooled=False`` each arm is estimated separately and
    a ``{Arm: SurvivalCurve}`` mapping is returned.
    """
    if not pooled:
        return {
            Arm.CONTROL: _km_single(dataset.subset(~dataset.treat)),
            Arm.TREATMENT: _km_single(dataset.subset(dataset.treat)),
        }
    return _km_single(dataset)


def _km_single(dataset: Dataset) -> SurvivalCurve:
    event_mask = dataset.status == 1
    times = np.unique(dataset.time[event_mask])
    all_times = np.sort(dataset.time)
    n_at_risk = all_times.size - np.searchsorted(all_times, times, side="left")
    event_times = np.sort(dataset.time[event_mask])
    d = np.searchsorted(event_times, times, side="right") - np.searchsorted(
        event_times, times, side="left"
    )
    values = np.cumprod(1.0 - d / n_at_risk) if times.size else np.empty(0)
    return SurvivalCurve(times=times, values=values)


def km_eval_left(curve: SurvivalCurve, t) -> float:
    """Left limit of the curve at t; equals 1 for t at or before the first jump."""
    return curve.eval_left(t)


def read_dataset_csv(path) -> Dataset:
    """Read a dataset from CSV with header ``id,time,status,arm``.

    ``status`` must be 0 or 1 and ``arm`` one of control/treatment
    (case-insensitive).  Errors report 1-based file line numbers.
    """
    path = Path(path)
    observations = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetFormatError(f"{path}: file is empty") from None
        if [h.strip().lower() for h in header] != list(CSV_HEADER):
            raise DatasetFormatError(
                f"{path}: line 1: expected header {','.join(CSV_HEADER)!r}, "
                f"got {','.join(header)!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise DatasetFormatError(f"{path}: line {lineno}: expected 4 fields, got {len(row)}")
            _, time_s, status_s, arm_s = (field.strip() for field in row)
            try:
                time = float(time_s)
            except ValueError:
                raise DatasetFormatError(f"{path}: line {lineno}: bad time {time_s!r}") from None
            if status_s not in ("0", "1"):
                raise DatasetFormatError(
                    f"{path}: line {lineno}: status must be 0 or 1, got {status_s!r}"
                )
            try:
                arm = Arm(arm_s.lower())
            except ValueError:
                raise DatasetFormatError(
                    f"{path}: line {lineno}: arm must be control or treatment, got {arm_s!r}"
                ) from None
            observations.append(Observation(time, int(status_s), arm))
    if not observations:
        raise DatasetFormatError(f"{path}: no data rows")
    return validate_dataset(observations)


def dataset_csv_text(dataset: Dataset) -> str:
    """Serialize a dataset in the standard CSV format (ids are 1..n)."""
    lines = [",".join(CSV_HEADER)]
    for i, obs in enumerate(dataset.observations(), start=1):
        lines.append(f"{i},{obs.time!r},{obs.status},{obs.arm.value}")
    return "\n".join(lines) + "\n"
