"""
Result files: sweep samples and curve data as CSV, fits and scans as JSON.

Floats are written with 17 significant digits so a CSV read back with the
round-trip parser reproduces every double of the run that wrote it.
"""

import csv
import json
import logging
import os

import pandas as pd

from config.ghost_config import CSV_FLOAT_FORMAT, FIT_KEYS, PASSAGE_KEYS, SAMPLE_FIELDNAMES
from ghost.errors import DomainViolation, MalformedData
from ghost.scaling import ScalingSample

logger = logging.getLogger(__name__)


def _cell(value):
    if isinstance(value, float):
        return format(value, CSV_FLOAT_FORMAT)
    return value


def write_rows_csv(stream, fieldnames, rows):
    writer = csv.DictWriter(stream, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: _cell(value) for key, value in row.items()})


def sample_rows(samples, engine, phase, param):
    engine = getattr(engine, "value", engine)
    return [
        {"r": float(s.r), "t": float(s.t), "engine": engine, "phase": phase, "param": param}
        for s in samples
    ]


def write_samples_csv(stream, samples, engine, phase, param):
    write_rows_csv(stream, SAMPLE_FIELDNAMES, sample_rows(samples, engine, phase, param))


def save_results_to_csv(samples, filename, engine, phase, param):
    """
    Saves sweep samples to a CSV file, replacing any previous run.
    """
    directory = os.path.dirname(filename)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(filename, "w", newline="") as csvfile:
        write_samples_csv(csvfile, samples, engine, phase, param)
    logger.info("wrote %d samples to %s", len(samples), filename)


def read_samples_csv(source):
    """
    Samples of a sweep CSV (path or text stream) plus its engine/phase/param
    labels taken from the first row.
    """
    try:
        frame = pd.read_csv(source, float_precision="round_trip",
                            dtype={"engine": str, "phase": str, "param": str})
    except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError, ValueError) as exc:
        raise MalformedData(f"unreadable sample CSV: {exc}") from None

    if list(frame.columns) != SAMPLE_FIELDNAMES:
        raise MalformedData(f"sample CSV columns must be {SAMPLE_FIELDNAMES}, got {list(frame.columns)}")
    try:
        r = pd.to_numeric(frame["r"], errors="raise")
        t = pd.to_numeric(frame["t"], errors="raise")
        samples = [ScalingSample(float(ri), float(ti)) for ri, ti in zip(r, t)]
    except (ValueError, DomainViolation) as exc:
        raise MalformedData(f"bad sample row: {exc}") from None

    labels = {}
    if len(frame):
        first = frame.iloc[0]
        labels = {key: first[key] for key in ("engine", "phase", "param")}
    return samples, labels


def fit_record(fit):
    data = fit.to_dict()
    return {key: data[key] for key in FIT_KEYS}


def passage_record(result, **extra):
    data = result.to_dict()
    return {**extra, **{key: data[key] for key in PASSAGE_KEYS}}


def dumps_json(payload):
    return json.dumps(payload, indent=2) + "\n"
