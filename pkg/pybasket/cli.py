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
The command line front end of the library. Examples:
  pybasket --set A --style european --m 1000
  pybasket --set B --style bermudan --reference --ref-file refs.json
  pybasket --config basket.cfg --sweep 10:100 --ref-file refs.json --out sweep.csv
  pybasket --config basket.cfg --reference --ref-m 200 --sweep 10:50
Invalid inputs are reported on stderr with the exit code 2, before any solve.
"""

import argparse
import json
import logging
import sys

from pybasket import __version__
from pybasket.bs_configuration import load_config, make_run_config, merge_configs
from pybasket.model import SpectralModel, Style
from pybasket.pricer import price
from pybasket.study import compute_reference, records_to_frame, run_sweep, write_csv, CSV_FLOAT_FORMAT

logger = logging.getLogger(__name__)


EXIT_INVALID = 2
DEFAULT_REF_FILE = "pybasket_references.json"


def _sweep_range_(text):
  parts = text.split(":")
  try:
    if(len(parts) != 2):
      raise ValueError()
    return tuple(int(p) for p in parts)
  except ValueError:
    raise argparse.ArgumentTypeError(f"expected a range min:max (found \"{text}\")")


def make_parser():
  """make_parser() -> argparse.ArgumentParser"""
  parser = argparse.ArgumentParser(prog="pybasket", description="PCA-based finite difference pricing of basket put options")
  source = parser.add_mutually_exclusive_group(required=True)
  source.add_argument("--set", choices=("A", "B", "C"), help="built-in parameter set")
  source.add_argument("--config", metavar="PATH", help="key/value configuration file")
  parser.add_argument("--style", choices=tuple(s.value for s in Style), help="exercise style (default: european)")
  size = parser.add_mutually_exclusive_group()
  size.add_argument("--m", type=int, help="number of interior mesh points per direction")
  size.add_argument("--sweep", type=_sweep_range_, metavar="MIN:MAX", help="range of mesh sizes of a convergence sweep")
  parser.add_argument("--reference", action="store_true", default=None, help="compute and store the reference values before the sweep or price, if any")
  parser.add_argument("--ref-m", dest="ref_m", type=int, metavar="M", help="mesh size of the reference values (default: 1000)")
  parser.add_argument("--ref-file", dest="ref_file", metavar="PATH", help="json file of the reference values")
  parser.add_argument("--out", metavar="PATH", help="output file (CSV for sweeps, json for prices)")
  parser.add_argument("--kappa1", type=float, help="mesh stretching parameter (default: 0.025)")
  parser.add_argument("--workers", type=int, help="number of worker processes (default: 1)")
  parser.add_argument("--verbose", action="store_true", help="log progress")
  parser.add_argument("--debug", action="store_true", help="log everything")
  parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
  return parser


def config_of_args(args):
  """config_of_args(argparse.Namespace) -> RunConfig
Merges the configuration file (if any) with the command line options, the latter taking precedence
  """
  data = load_config(args.config) if(args.config is not None) else {}
  options = {key: getattr(args, key) for key in ("set", "style", "m", "sweep", "reference", "ref_m", "ref_file", "out", "kappa1", "workers")}
  return make_run_config(merge_configs(data, options))


def run_price(config, out=sys.stdout):
  """run_price(RunConfig) -> PricingReport
Prices the configuration, prints the result and stores it in the `out` file of the configuration, if any
  """
  model = config.market()
  contract = config.contract()
  spectral = SpectralModel.of_market(model)
  report = price(model, contract, spectral, config["m"], S0=config.spot(), kappa1=config.kappa1, workers=config.workers)
  print(f"w_tilde = {report.w_tilde:.10g}", file=out)
  print(f"w1      = {report.w1:.10g}", file=out)
  for l, v in enumerate(report.w1l, start=2):
    print(f"w1_{l} - w1 = {v - report.w1:.10g}", file=out)
  print(f"m = {report.m}, N = {report.N}, {sum(report.seconds):.2f}s", file=out)
  path = config.get("out")
  if(path is not None):
    with open(path, "w", encoding="utf-8") as f:
      json.dump(report._asdict(), f, indent=2)
      f.write("\n")
  return report


def _run_(config, out):
  ## 1. reference values, reused by the sweep
  ref = None
  if(config.get("reference")):
    path = config.get("ref_file", DEFAULT_REF_FILE)
    ref = compute_reference(config, path=path)
    print(f"{config.reference_key()}: w_tilde = {ref['w_tilde']:.10g}, w1 = {ref['w1']:.10g} (saved in {path})", file=out)
  ## 2. sweep or single price
  if(config.get("sweep") is not None):
    records = run_sweep(config, reference=ref)
    path = config.get("out")
    if(path is None):
      records_to_frame(records).to_csv(out, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    else:
      write_csv(records, path)
  elif("m" in config):
    run_price(config, out)


def main(argv=None, out=sys.stdout):
  """main(list[str]) -> int
Runs the command line and returns its exit code
  """
  args = make_parser().parse_args(argv)
  level = logging.DEBUG if(args.debug) else (logging.INFO if(args.verbose) else logging.WARNING)
  logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s: %(message)s")
  try:
    config = config_of_args(args)
    if(not (config.get("reference") or ("m" in config) or ("sweep" in config))):
      raise ValueError("ERROR: one of --m, --sweep or --reference is required")
  except (ValueError, KeyError, OSError) as e:
    print(e.args[0] if(isinstance(e, KeyError) and e.args) else str(e), file=sys.stderr)
    return EXIT_INVALID
  _run_(config, out)
  return 0


if __name__ == "__main__":
  sys.exit(main())
