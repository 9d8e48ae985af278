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

import collections

import numpy as np
import pytest

from pybasket.model import MarketModel, BasketContract, SpectralModel, Style


def pytest_addoption(parser):
  parser.addoption("--runslow", action="store_true", default=False, help="run the long reference computations")

def pytest_configure(config):
  config.addinivalue_line("markers", "slow: long reference runs (m = 1000, sweeps)")

def pytest_collection_modifyitems(config, items):
  if(config.getoption("--runslow")):
    return
  skip_slow = pytest.mark.skip(reason="needs --runslow")
  for item in items:
    if("slow" in item.keywords):
      item.add_marker(skip_slow)


two_assets_cls = collections.namedtuple("two_assets_cls", ("model", "european", "bermudan", "spectral"))

@pytest.fixture
def two_assets():
  """A small two-asset market, with a European and a Bermudan (E = 4) contract"""
  model = MarketModel(0.05, [0.3, 0.2], [[1., 0.5], [0.5, 1.]])
  european = BasketContract(1., 1., [0.5, 0.5])
  bermudan = BasketContract(1., 1., [0.5, 0.5], style=Style.BERMUDAN, E=4)
  return two_assets_cls(model, european, bermudan, SpectralModel.of_market(model))

@pytest.fixture
def three_assets():
  """A three-asset market with a European contract"""
  rho = [[1., 0.6, 0.3], [0.6, 1., 0.4], [0.3, 0.4, 1.]]
  model = MarketModel(0.04, [0.25, 0.35, 0.3], rho)
  contract = BasketContract(10., 0.5, [0.2, 0.3, 0.5])
  return model, contract, SpectralModel.of_market(model)
