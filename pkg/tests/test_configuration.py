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

import numpy as np
import pytest

from pybasket.bs_configuration import *
from pybasket.model import Style


_TEXT = """
# three assets
strike = 40
T = 1
r = 0.06
E = 10   # exercise dates
style = bermudan
sigma = 0.2, 0.3, 0.25
weights = 0.3, 0.3, 0.4
rho = 1, 0.5, 0.2, 0.5, 1, 0.3, 0.2, 0.3, 1
sweep = 10:20
name = small
"""


def test_parse_config_text():
  print("==========================================")
  print("= test_parse_config_text")
  data = parse_config_text(_TEXT)
  assert(data["strike"] == 40)
  assert(data["r"] == 0.06)
  assert(data["style"] == "bermudan")
  assert(data["sigma"] == [0.2, 0.3, 0.25])
  assert(data["sweep"] == [10, 20])
  assert(len(data["rho"]) == 9)
  assert(parse_config_text("reference = yes\nworkers=4")  == {"reference": True, "workers": 4})

  for text in ("K 40", "K = 40\nK = 41", "= 3"):
    with pytest.raises(ValueError):
      parse_config_text(text)


def test_load_config(tmp_path):
  print("==========================================")
  print("= test_load_config")
  path = tmp_path / "basket.cfg"
  path.write_text(_TEXT, encoding="utf-8")
  config = make_run_config(load_config(str(path)))
  assert(config["d"] == 3)
  assert(config["K"] == 40)
  assert(config["strike"] == 40)
  assert("weights" in config)
  assert(config.style is Style.BERMUDAN)
  assert(config["rho"][1] == [0.5, 1, 0.3])
  assert(list(config.sweep_range()) == list(range(10, 21)))
  assert(config.label == "small")
  assert(config.reference_key().startswith("small/bermudan/0.025/"))
  assert(config.unlink()["weights"] == [0.3, 0.3, 0.4])
  assert("d" not in config.unlink())
  assert(config.unlink(full=True)["d"] == 3)

  contract = config.contract()
  assert((contract.K == 40.) and (contract.E == 10) and contract.is_bermudan())
  assert(config.market().d == 3)
  assert(np.array_equal(config.spot(), [40., 40., 40.]))


def test_builtin_sets():
  print("==========================================")
  print("= test_builtin_sets")
  for name, d, K in (("A", 5, 1.), ("B", 10, 40.), ("C", 15, 40.)):
    data = builtin_set(name)
    assert((data["d"] == d) and (data["K"] == K))
    assert(abs(sum(data["omega"]) - 1.) <= 1e-12)
    config = make_run_config({"set": name, "m": 10})
    assert(config["d"] == d)
    assert(config.reference_key() == f"{name}/european/0.025")
    assert(config.unlink() == {"set": name, "m": 10})
    # re-validating a configuration keeps it unchanged
    assert(make_run_config(config) == config)
    assert(make_run_config(config.unlink()) == config)
  # copies are independent
  data = builtin_set("B")
  data["rho"][0][1] = 0.
  assert(builtin_set("B")["rho"][0][1] == 0.25)
  with pytest.raises(ValueError):
    builtin_set("D")

  config = make_run_config({"parameter_set": "A", "style": "bermudan", "spot": [1.1] * 5, "mesh_size": 12, "kappa1": 0.05})
  assert(config["S0"] == [1.1] * 5)
  assert(config.reference_key().startswith("A/bermudan/0.05/"))
  assert(config.contract().E == 10)
  assert(np.array_equal(config.spot(), [1.1] * 5))


def test_configuration_errors():
  print("==========================================")
  print("= test_configuration_errors")
  inline = {"K": 1., "T": 1., "r": 0.05, "sigma": [0.3, 0.2], "omega": [0.5, 0.5], "rho": [[1., 0.5], [0.5, 1.]], "m": 10}
  assert(make_run_config(inline)["d"] == 2)
  assert(make_run_config(dict(inline, rho=[1., 0.5, 0.5, 1.]))["rho"] == [[1., 0.5], [0.5, 1.]])
  invalid = (
    {"m": 10},                                         # no market data
    dict(inline, set="A"),                            # both a set and inline data
    {"set": "A", "strike": 1., "m": 10},              # same
    dict(inline, omega=[0.5, 0.6]),                    # weights not summing to 1
    dict(inline, omega=[0.5, 0.25, 0.25]),             # wrong dimension
    dict(inline, rho=[[1., 1.2], [1.2, 1.]]),          # not a correlation
    dict(inline, sigma=[0.3, -0.2]),
    dict(inline, m=5),
    dict(inline, sweep=[10, 20]),                      # both a mesh size and a sweep
    {"set": "B", "sweep": [20, 10]},
    {"set": "B", "sweep": [5, 20]},
    {"set": "B", "style": "american", "m": 10},
    {"set": "B", "workers": 0, "m": 10},
    {"K": 1., "T": 1., "sigma": [0.3, 0.2], "omega": [0.5, 0.5], "rho": [[1., 0.5], [0.5, 1.]]},  # no rate
  )
  for data in invalid:
    with pytest.raises(ValueError):
      make_run_config(data)
  with pytest.raises(KeyError):
    make_run_config(dict(inline, volatility=[0.3, 0.2]))
  with pytest.raises(KeyError):
    resolve_key("mesh")
  assert(resolve_key("maturity") == "T")
  assert(resolve_key("T") == "T")


def test_merge_configs():
  print("==========================================")
  print("= test_merge_configs")
  res = merge_configs({"set": "A", "m": 10, "style": "european"}, {"m": 20, "style": None, "out": "x.csv"})
  assert(res == {"set": "A", "m": 20, "style": "european", "out": "x.csv"})


def test_reference_key():
  print("==========================================")
  print("= test_reference_key")
  ## 1. a built-in set as is
  assert(make_run_config({"set": "B", "style": "bermudan", "m": 10}).reference_key() == "B/bermudan/0.025")
  assert(make_run_config({"set": "B", "style": "bermudan", "m": 20, "workers": 2}).reference_key() == "B/bermudan/0.025")

  ## 2. overriding the spot or the exercise times of a set changes the key
  base = make_run_config({"set": "B", "style": "bermudan", "E": 10, "m": 10})
  other = make_run_config({"set": "B", "style": "bermudan", "E": 2, "S0": [30.] * 10, "m": 10})
  assert(base.reference_key() != other.reference_key())
  assert(base.reference_key().startswith("B/bermudan/0.025/"))
  assert(other.reference_key().startswith("B/bermudan/0.025/"))
  assert(other.reference_key() == make_run_config({"set": "B", "style": "bermudan", "E": 2, "S0": [30.] * 10, "sweep": [10, 20]}).reference_key())
  assert(make_run_config({"set": "B", "style": "bermudan", "E": 2, "m": 10}).reference_key() != other.reference_key())
  times = make_run_config({"set": "B", "style": "bermudan", "exercise_times": [0.3, 0.7, 1.], "m": 10})
  assert(times.reference_key() not in (base.reference_key(), other.reference_key()))

  ## 3. inline data of the same name
  inline = {"name": "two", "K": 1., "T": 1., "r": 0.05, "sigma": [0.3, 0.2], "omega": [0.5, 0.5], "rho": [[1., 0.5], [0.5, 1.]], "m": 10}
  key = make_run_config(inline).reference_key()
  assert(key.startswith("two/european/0.025/"))
  assert(make_run_config(dict(inline, m=20)).reference_key() == key)
  assert(make_run_config(dict(inline, rho=[1., 0.5, 0.5, 1.])).reference_key() == key)
  assert(make_run_config(dict(inline, K=1.1)).reference_key() != key)
  assert(make_run_config(dict(inline, sigma=[0.3, 0.25])).reference_key() != key)

def test_literature_values():
  print("==========================================")
  print("= test_literature_values")
  for (name, style), value in LITERATURE_VALUES.items():
    assert(name in ("A", "B", "C"))
    assert(isinstance(style, Style))
    assert(0. < value < builtin_set(name)["K"])
