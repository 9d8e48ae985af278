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
This file contains the run configurations of the library.
A run configuration is a wrapper around a dictionary mapping configuration keys to their values.
Keys may be given with an alias (e.g., `strike` for `K`), which is resolved to its canonical name.
The market and contract data either come from one of the built-in parameter sets (key `set`),
 or are given inline (keys `d, K, T, r, sigma, omega, rho`), typically from a key/value text file:
   # comment
   K = 40
   sigma = 0.2, 0.2, 0.2
   rho = 1, 0.5, 0, 0.5, 1, 0, 0, 0, 1   (row-major)
"""

import hashlib
import itertools
import json
import logging

import numpy as np

from pybasket.utils import _empty__, positive_reals, unit_interval
from pybasket.bs_result import check_errors__c, raise_if
from pybasket.bs_attributes import Bool, Enum, Float, Int, List, Matrix, String, check_value
from pybasket.grid import KAPPA1
from pybasket.model import BasketContract, MarketModel, Style

logger = logging.getLogger(__name__)


M_RANGE = (10, 1000)
FINGERPRINT_SIZE = 12


################################################################################
# built-in parameter sets
################################################################################

_SET_A = {
  "d": 5, "K": 1., "T": 1., "r": 0.05, "E": 10,
  "sigma": [0.518, 0.648, 0.623, 0.570, 0.530],
  "omega": [0.381, 0.065, 0.057, 0.270, 0.227],
  "rho": [
    [1.00, 0.79, 0.82, 0.91, 0.84],
    [0.79, 1.00, 0.73, 0.80, 0.76],
    [0.82, 0.73, 1.00, 0.77, 0.72],
    [0.91, 0.80, 0.77, 1.00, 0.90],
    [0.84, 0.76, 0.72, 0.90, 1.00],
  ],
}

def _uniform_set_(d):
  return {
    "d": d, "K": 40., "T": 1., "r": 0.06, "E": 10,
    "sigma": [0.2] * d,
    "omega": [1. / d] * d,
    "rho": [[1. if(i == j) else 0.25 for j in range(d)] for i in range(d)],
  }

_BUILTIN_SETS = {"A": lambda: _SET_A, "B": lambda: _uniform_set_(10), "C": lambda: _uniform_set_(15)}

LITERATURE_VALUES = {
  ("A", Style.EUROPEAN): 0.1759,
  ("B", Style.BERMUDAN): 1.06,
  ("C", Style.BERMUDAN): 1.00,
}
"""Published values of the prices at S0 = (K, ..., K) obtained with other methods"""


def builtin_set(name):
  """builtin_set(str) -> dict
Returns a fresh copy of the market and contract data of the built-in set `name` (A, B or C)
  """
  factory = _BUILTIN_SETS.get(name)
  if(factory is None):
    raise ValueError(f"ERROR: unknown parameter set \"{name}\" (expected one of {', '.join(_BUILTIN_SETS)})")
  data = factory()
  return {k: ([list(row) for row in v] if(k == "rho") else (list(v) if(isinstance(v, list)) else v)) for k, v in data.items()}


################################################################################
# schema
################################################################################

_strictly_positive = (0, None, (False, False))

SCHEMA = {
  "set": Enum(tuple(_BUILTIN_SETS)),
  "name": String(),
  "d": Int(2, None),
  "K": Float(*positive_reals),
  "T": Float(*positive_reals),
  "r": Float(0, None),
  "E": Int(1, None),
  "exercise_times": List((1, None), Float(*positive_reals)),
  "sigma": List((2, None), Float(*positive_reals)),
  "omega": List((2, None), Float(*positive_reals)),
  "rho": Matrix((2, None), Float(*unit_interval)),
  "S0": List((2, None), Float(*positive_reals)),
  "style": Enum(tuple(s.value for s in Style)),
  "m": Int(M_RANGE[0], None),
  "sweep": List(((2, 2, (True, True)),), Int((M_RANGE[0], M_RANGE[1], (True, True)))),
  "reference": Bool(),
  "ref_m": Int((M_RANGE[0], M_RANGE[1], (True, True))),
  "ref_file": String(),
  "out": String(),
  "kappa1": Float(_strictly_positive),
  "workers": Int(1, None),
}

ALIASES = {
  "parameter_set": "set",
  "strike": "K",
  "maturity": "T",
  "rate": "r",
  "exercise_count": "E",
  "volatilities": "sigma",
  "weights": "omega",
  "correlation": "rho",
  "spot": "S0",
  "mesh_size": "m",
}

INLINE_KEYS = ("d", "K", "T", "r", "sigma", "omega", "rho")
REQUIRED_INLINE_KEYS = ("K", "T", "r", "sigma", "omega", "rho")
SET_OVERRIDE_KEYS = ("S0", "E", "exercise_times")


def resolve_key(key):
  """resolve_key(str) -> str
Returns the canonical name of a configuration key; raises KeyError if the key is unknown
  """
  if(key in SCHEMA):
    return key
  res = ALIASES.get(key)
  if(res is None):
    raise KeyError(f"ERROR: unknown configuration key \"{key}\"")
  return res


################################################################################
# configuration class
################################################################################

class RunConfig(object):
  """This class implements run configurations.
It is a wrapper around a simple dictionary mapping canonical keys to their values,
 which saves the names given by the user in an annex registry.
It is built and validated by `make_run_config`; the user should only see dictionaries.
  """
  __slots__ = ("m_dict", "m_names",)

  def __init__(self, d, names=None):
    assert(isinstance(d, dict))
    self.m_dict = d
    self.m_names = {} if(names is None) else names

  ## base mapping API

  def get(self, key, default=None):
    """get(str, object) -> object
Retrieves a value from the configuration; the key can be an alias
    """
    res = self.m_dict.get(key, _empty__)
    if((res is _empty__) and (key in ALIASES)):
      res = self.m_dict.get(ALIASES[key], _empty__)
    return default if(res is _empty__) else res

  def __getitem__(self, key):
    res = self.get(key, _empty__)
    if(res is _empty__):
      raise KeyError(key)
    return res

  def __contains__(self, key):
    return self.get(key, _empty__) is not _empty__

  def items(self):
    return self.m_dict.items()
  def __iter__(self):
    return self.m_dict.__iter__()

  def unlink(self, full=False):
    """unlink(bool) -> dict
Returns the dictionary of the entries given by the user, named as given by the user.
If the parameter `full` is `True`, also includes the entries derived during validation (e.g., the data of a built-in set)
    """
    if(full):
      return {self.m_names.get(k, k): v for k, v in self.m_dict.items()}
    return {self.m_names[k]: v for k, v in self.m_dict.items() if(k in self.m_names)}

  ## run parameters

  @property
  def style(self): return Style(self.get("style", Style.EUROPEAN.value))

  @property
  def kappa1(self): return float(self.get("kappa1", KAPPA1))

  @property
  def workers(self): return int(self.get("workers", 1))

  @property
  def label(self):
    """The name of the parameter data: the built-in set, or the `name` entry (default "inline")"""
    return self.get("set", self.get("name", "inline"))

  def sweep_range(self):
    """sweep_range() -> range
Returns the mesh sizes of the sweep (the single mesh size `m` if no sweep is configured)
    """
    sweep = self.get("sweep")
    if(sweep is not None):
      return range(int(sweep[0]), int(sweep[1]) + 1)
    return range(self["m"], self["m"] + 1)

  def fingerprint(self):
    """fingerprint() -> str
Returns a short digest of the market data, the exercise times and the spot vector of this configuration
    """
    contract = self.contract()
    data = {
      "K": float(self["K"]), "T": float(self["T"]), "r": float(self["r"]),
      "sigma": [float(v) for v in self["sigma"]],
      "omega": [float(v) for v in self["omega"]],
      "rho": [[float(v) for v in row] for row in self["rho"]],
      "exercise_times": contract.exercise_times.tolist() if(contract.is_bermudan()) else [],
      "S0": self.spot().tolist(),
    }
    return hashlib.sha256(json.dumps(data, sort_keys=True).encode("utf-8")).hexdigest()[:FINGERPRINT_SIZE]

  def reference_key(self):
    """reference_key() -> str
Returns the key of the reference values of this configuration: "<set>/<style>/<kappa1>" for a built-in set as is,
 followed by "/<fingerprint>" for inline data or when the spot or the exercise times of the set are overridden
    """
    res = f"{self.label}/{self.style.value}/{self.kappa1!r}"
    if((self.get("set") is None) or any((k in self.m_names) for k in SET_OVERRIDE_KEYS)):
      res = f"{res}/{self.fingerprint()}"
    return res

  ## financial objects

  def market(self):
    """market() -> MarketModel"""
    return MarketModel(self["r"], self["sigma"], self["rho"])

  def contract(self):
    """contract() -> BasketContract"""
    return BasketContract(self["K"], self["T"], self["omega"], self.style, self.get("E"), self.get("exercise_times"))

  def spot(self):
    """spot() -> np.ndarray
Returns the spot vector S0 (default (K, ..., K))
    """
    S0 = self.get("S0")
    if(S0 is None):
      return np.full(len(self["sigma"]), float(self["K"]))
    return np.array(S0, dtype=float)

  def __eq__(self, other):
    if(isinstance(other, RunConfig)):
      return (self.m_dict == other.m_dict)
    return False

  def __str__(self):
    return str(self.unlink(full=True))


################################################################################
# parsing and construction
################################################################################

def _parse_scalar_(text):
  low = text.lower()
  if(low in ("true", "yes")): return True
  if(low in ("false", "no")): return False
  for conv in (int, float):
    try:
      return conv(text)
    except ValueError:
      pass
  return text


def _parse_value_(text):
  text = text.strip()
  if("," in text):
    return [_parse_scalar_(el.strip()) for el in text.split(",") if(el.strip())]
  if(":" in text):
    parts = [_parse_scalar_(el.strip()) for el in text.split(":")]
    if((len(parts) == 2) and all(isinstance(p, int) and not isinstance(p, bool) for p in parts)):
      return parts
  return _parse_scalar_(text)


def parse_config_text(text):
  """parse_config_text(str) -> dict
Parses a key/value configuration text: one `key = value` per line, `#` starts a comment,
 lists are comma-separated and ranges are written `min:max`.
Raises ValueError on malformed lines or duplicated keys.
  """
  res = {}
  errors = check_errors__c()
  for i, line in enumerate(text.splitlines(), start=1):
    line = line.split("#", 1)[0].strip()
    if(not line):
      continue
    if("=" not in line):
      errors.add(f"line {i}", f"expected \"key = value\" (found \"{line}\")")
      continue
    key, value = (el.strip() for el in line.split("=", 1))
    if(not key):
      errors.add(f"line {i}", "missing key")
    elif(key in res):
      errors.add(f"line {i}", f"duplicated key \"{key}\"")
    else:
      res[key] = _parse_value_(value)
  raise_if(errors)
  return res


def load_config(path):
  """load_config(str) -> dict
Reads and parses the key/value configuration file at `path`
  """
  with open(path, "r", encoding="utf-8") as f:
    res = parse_config_text(f.read())
  logger.debug(f"configuration {path}: {sorted(res)}")
  return res


def _reshape_rho_(rho, d):
  """A row-major flat list of d^2 entries is reshaped into a matrix"""
  if(isinstance(rho, (list, tuple)) and (len(rho) > 0) and not isinstance(rho[0], (list, tuple))):
    if((d is not None) and (len(rho) == d * d)):
      return [list(rho[i * d:(i + 1) * d]) for i in range(d)]
    size = int(round(np.sqrt(len(rho))))
    if(size * size == len(rho)):
      return [list(rho[i * size:(i + 1) * size]) for i in range(size)]
  return rho


def make_run_config(data):
  """make_run_config(dict) -> RunConfig
Validates the configuration data and returns the corresponding RunConfig.
The market and contract data come from exactly one of the key `set` or the inline keys.
Raises KeyError on unknown keys, and ValueError listing all the problems of the data.
  """
  if(isinstance(data, RunConfig)):
    return data
  # 1. resolve the aliases
  d_new, names = {}, {}
  errors = check_errors__c()
  for key, value in data.items():
    if(value is None):
      continue
    canonical = resolve_key(key)
    if(canonical in d_new):
      errors.add(canonical, f"given twice (as \"{names[canonical]}\" and \"{key}\")")
    d_new[canonical] = value
    names[canonical] = key

  # 2. market and contract data
  inline = [k for k in INLINE_KEYS if(k in d_new)]
  if(("set" in d_new) == bool(inline)):
    errors.add("<input>", "exactly one of a parameter set or inline market data must be given"
                          + (f" (found set and {', '.join(inline)})" if(inline) else ""))
  elif(not inline):
    if(check_value(SCHEMA["set"], d_new["set"], "set", errors)):
      for k, v in builtin_set(d_new["set"]).items():
        d_new.setdefault(k, v)
  else:
    for k in REQUIRED_INLINE_KEYS:
      if(k not in d_new):
        errors.add_missing(k)
  if("rho" in d_new):
    d_new["rho"] = _reshape_rho_(d_new["rho"], d_new.get("d"))

  # 3. value checks
  for key, value in d_new.items():
    check_value(SCHEMA[key], value, key, errors)
  if(("m" in d_new) and ("sweep" in d_new)):
    errors.add("<input>", "only one of a mesh size and a sweep range can be given")
  sweep = d_new.get("sweep")
  if((sweep is not None) and SCHEMA["sweep"](sweep) and (sweep[0] > sweep[1])):
    errors.add("sweep", f"empty range {sweep[0]}:{sweep[1]}")

  # 4. consistency of the dimensions
  if(not errors):
    d = d_new.get("d", len(d_new["sigma"]))
    d_new["d"] = d
    for key in ("sigma", "omega", "S0"):
      if((key in d_new) and (len(d_new[key]) != d)):
        errors.add(key, f"expected {d} entries (found {len(d_new[key])})")
    if(np.shape(d_new["rho"]) != (d, d)):
      errors.add("rho", f"expected a {d}x{d} matrix (found shape {np.shape(d_new['rho'])})")
  raise_if(errors)

  res = RunConfig(d_new, names)
  # 5. the financial objects check the remaining invariants (weights summing to 1, PSD correlations, ...)
  res.market()
  res.contract()
  return res


def merge_configs(*datas):
  """merge_configs(dict, ...) -> dict
Returns the union of the dictionaries in parameter, later ones overriding earlier ones (None values are skipped)
  """
  return {k: v for k, v in itertools.chain.from_iterable(d.items() for d in datas) if(v is not None)}
