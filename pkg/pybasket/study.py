# This file is part of the pybasket library.
# Copyright (c) 2024 the pybasket authors.
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License as
# published by the Free Software Foundation, version 3.
#
# This program is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU
# Lesser General Public License for more details.
#
# You should have received a copy of the GNU Lesser General Public
# License along with this program. If not, see
# <http://www.gnu.org/licenses/>.
#

"""
This file contains the convergence study harness of the library:
 - the reference values, computed with m = 1000 and cached in a json file
 - the mesh sweeps, whose records split the error of w_tilde into the error of the leading term
   and the errors of the correction terms w1l_l - w1
 - the CSV emission and parsing of the sweep records
 - the estimation of the convergence order and of the error constant
"""

import json
import logging
import os
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pandas as pd

from pybasket.model import SpectralModel
from pybasket.pricer import price
from pybasket.tasks import TaskGraph, task_info_cls

logger = logging.getLogger(__name__)


REFERENCE_M = 1000
CSV_COLUMNS = ("m", "N", "w_tilde", "w1", "err_total", "err_leading", "err_correction", "seconds")
CSV_FLOAT_FORMAT = "%.10g"
CORRECTION_PREFIX = "err_corr_"


################################################################################
# records
################################################################################

SweepRecord = namedtuple("SweepRecord", CSV_COLUMNS + ("err_corr",))
SweepRecord.__doc__ = """One row of a sweep:
  m, N: the mesh size and number of time steps
  w_tilde, w1: the combined value and the leading term
  err_total: |w_tilde(m) - w_tilde_ref|
  err_leading: w1(m) - w1_ref
  err_correction: the sum over l of the correction errors
  seconds: the wall-clock time of the price
  err_corr: the correction errors (w1l_l(m) - w1l_l_ref) - (w1(m) - w1_ref), for l = 2..d"""


def make_record(report, reference):
  """make_record(PricingReport, dict) -> SweepRecord
Returns the record of a price, with its errors w.r.t. the reference values
  """
  e1 = report.w1 - reference["w1"]
  corr = tuple((v - ref) - e1 for v, ref in zip(report.w1l, reference["w1l"]))
  correction = 0.
  for c in corr:
    correction = correction + c
  return SweepRecord(
    report.m, report.N, report.w_tilde, report.w1,
    abs(e1 + correction), e1, correction, float(sum(report.seconds)), corr)


def records_to_frame(records):
  """records_to_frame(iterable[SweepRecord]) -> pd.DataFrame
Returns the table of the records, sorted by increasing m;
 the correction errors are in the columns err_corr_2, ..., err_corr_d after the mandatory ones
  """
  records = sorted(records, key=lambda r: r.m)
  rows = []
  for rec in records:
    row = {k: getattr(rec, k) for k in CSV_COLUMNS}
    for l, v in enumerate(rec.err_corr, start=2):
      row[f"{CORRECTION_PREFIX}{l}"] = v
    rows.append(row)
  res = pd.DataFrame(rows)
  if(res.empty):
    res = pd.DataFrame(columns=list(CSV_COLUMNS))
  return res


def write_csv(records, path):
  """write_csv(iterable[SweepRecord], str) -> pd.DataFrame
Writes the records as a comma-separated file with a header row and 10 significant digits
  """
  frame = records_to_frame(records)
  frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
  logger.info(f"{len(frame)} records written to {path}")
  return frame


def read_csv(path):
  """read_csv(str) -> list[SweepRecord]
Parses a file written by `write_csv`
  """
  frame = pd.read_csv(path)
  missing = [c for c in CSV_COLUMNS if(c not in frame.columns)]
  if(missing):
    raise ValueError(f"ERROR: missing columns in {path}: {', '.join(missing)}")
  corr_columns = sorted((c for c in frame.columns if(c.startswith(CORRECTION_PREFIX))),
                        key=lambda c: int(c[len(CORRECTION_PREFIX):]))
  res = []
  for row in frame.itertuples(index=False):
    row = row._asdict()
    res.append(SweepRecord(
      int(row["m"]), int(row["N"]),
      *(float(row[c]) for c in CSV_COLUMNS[2:]),
      tuple(float(row[c]) for c in corr_columns)))
  return res


################################################################################
# references
################################################################################

def load_reference(path, key):
  """load_reference(str, str) -> dict
Returns the reference values stored under `key` in the json file at `path`, or None if there is none
  """
  if((path is None) or (not os.path.exists(path))):
    return None
  with open(path, "r", encoding="utf-8") as f:
    data = json.load(f)
  return data.get(key)


def save_reference(path, key, reference):
  """save_reference(str, str, dict) -> None
Stores the reference values under `key` in the json file at `path`, keeping its other entries
  """
  data = {}
  if(os.path.exists(path)):
    with open(path, "r", encoding="utf-8") as f:
      data = json.load(f)
  data[key] = reference
  with open(path, "w", encoding="utf-8") as f:
    json.dump(data, f, indent=2, sort_keys=True)
    f.write("\n")
  logger.info(f"reference \"{key}\" saved in {path}")


def _financial_objects_(config):
  model = config.market()
  return model, config.contract(), SpectralModel.of_market(model)


def compute_reference(config, m=None, path=None):
  """compute_reference(RunConfig) -> dict
compute_reference(RunConfig, int, str) -> dict
Computes the reference values (w_tilde, w1 and w1l) of the configuration with `m` interior points
 (default: the `ref_m` entry of the configuration, else REFERENCE_M),
 and stores them in the file `path` (default: the `ref_file` entry of the configuration, if any)
  """
  if(m is None):
    m = config.get("ref_m", REFERENCE_M)
  model, contract, spectral = _financial_objects_(config)
  logger.info(f"computing reference {config.reference_key()} with m={m}")
  report = price(model, contract, spectral, m, S0=config.spot(), kappa1=config.kappa1, workers=config.workers)
  res = {
    "w_tilde": report.w_tilde, "w1": report.w1, "w1l": list(report.w1l),
    "m": report.m, "N": report.N,
  }
  if(path is None):
    path = config.get("ref_file")
  if(path is not None):
    save_reference(path, config.reference_key(), res)
  return res


def _obtain_reference_(config, ref_m, path):
  res = load_reference(path, config.reference_key())
  if(res is not None):
    logger.info(f"reference {config.reference_key()} loaded from {path}")
    return res
  return compute_reference(config, ref_m, path)


def _sweep_row_(model, contract, spectral, m, S0, kappa1):
  return price(model, contract, spectral, m, S0=S0, kappa1=kappa1)


def sweep_graph(config, ref_m=REFERENCE_M, path=None, reference=None):
  """sweep_graph(RunConfig, int, str) -> TaskGraph
sweep_graph(RunConfig, int, str, dict) -> TaskGraph
Returns the graph obtaining the reference (task "reference") before the prices of every mesh size
 of the sweep (tasks "m=<m>"). The reference is the given one, else loaded from `path`, else computed.
  """
  model, contract, spectral = _financial_objects_(config)
  graph = TaskGraph()
  if(reference is None):
    graph.add(task_info_cls("reference", _obtain_reference_, (config, ref_m, path)))
  else:
    graph.add(task_info_cls("reference", dict, (reference,)))
  for m in config.sweep_range():
    row = task_info_cls(f"m={m}", _sweep_row_, (model, contract, spectral, m, config.spot(), config.kappa1))
    graph.add(row, after="reference")
  return graph


def run_sweep(config, reference=None, ref_m=None, executor=None):
  """run_sweep(RunConfig) -> list[SweepRecord]
run_sweep(RunConfig, dict, int, Executor) -> list[SweepRecord]
Prices the configuration for every mesh size of its sweep range, and returns the records in increasing m.
The reference values are taken from `reference`, else from the `ref_file` of the configuration,
 else computed with `ref_m` interior points (default: the `ref_m` entry of the configuration, else REFERENCE_M).
With `workers > 1` in the configuration (or a given `executor`), the mesh sizes are priced concurrently.
  """
  if(ref_m is None):
    ref_m = config.get("ref_m", REFERENCE_M)
  graph = sweep_graph(config, ref_m, config.get("ref_file"), reference)
  if((executor is None) and (config.workers > 1)):
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
      results = graph.run(pool)
  else:
    results = graph.run(executor)

  reference = results["reference"]
  res = []
  for m in config.sweep_range():
    rec = make_record(results[f"m={m}"], reference)
    logger.info(f"m={rec.m}: w_tilde={rec.w_tilde:.10g} err_total={rec.err_total:.3e}")
    res.append(rec)
  return res


################################################################################
# analysis
################################################################################

def _signed_errors_(records, column):
  if(column == "err_total"):
    return np.array([r.err_leading + r.err_correction for r in records])
  return np.array([getattr(r, column) for r in records], dtype=float)


def convergence_order(records, column="err_total"):
  """convergence_order(iterable[SweepRecord], str) -> float
Returns the least-squares slope of log|err| versus log m (about -2 for a second-order scheme).
Points next to a sign change of the error, and zero errors, are excluded.
Raises ValueError if less than two points remain.
  """
  records = sorted(records, key=lambda r: r.m)
  err = _signed_errors_(records, column)
  m = np.array([r.m for r in records], dtype=float)
  sign = np.sign(err)
  keep = (sign != 0.)
  change = (sign[1:] != sign[:-1])
  keep[1:] &= ~change
  keep[:-1] &= ~change
  if(np.count_nonzero(keep) < 2):
    raise ValueError(f"ERROR: not enough points to estimate the order of \"{column}\"")
  slope, _ = np.polyfit(np.log(m[keep]), np.log(np.abs(err[keep])), 1)
  return float(slope)


ErrorBound = namedtuple("ErrorBound", ("c", "median", "ratio"))
ErrorBound.__doc__ = "c = max_m |err| m^2, the median of |err| m^2 over the sweep, and c / median"


def error_bound(records, column="err_total"):
  """error_bound(iterable[SweepRecord], str) -> ErrorBound
Returns the smallest constant c with |err(m)| <= c m^-2 over the records, compared to the median of |err(m)| m^2
  """
  records = list(records)
  if(not records):
    raise ValueError("ERROR: no record")
  scaled = np.abs(_signed_errors_(records, column)) * np.array([r.m for r in records], dtype=float) ** 2
  c = float(np.max(scaled))
  median = float(np.median(scaled))
  return ErrorBound(c, median, (c / median) if(median > 0.) else float("inf"))
