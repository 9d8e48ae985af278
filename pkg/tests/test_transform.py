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

from pybasket.bs_configuration import builtin_set
from pybasket.model import BasketContract, MarketModel, SpectralModel, reversed_schedule
from pybasket.transform import *


def test_coordinate_maps(two_assets):
  print("==========================================")
  print("= test_coordinate_maps")
  model, contract, spectral = two_assets.model, two_assets.european, two_assets.spectral
  ## 1. the unit cube map
  assert(y_of_x(0.) == 0.5)
  assert(abs(x_of_y(0.75) - 1.) <= 1e-15)
  ## 2. prices to the unit cube and back
  s = np.array([[0.8, 1.3], [1., 1.], [2.5, 0.4]])
  for t in (0., 0.4, 1.):
    y = s_to_y(s, t, spectral, model, contract)
    assert(np.all((y > 0.) & (y < 1.)))
    assert(np.allclose(y_to_s(y, t, spectral, model, contract), s, rtol=1e-12, atol=0.))
  ## 3. the drift
  assert(np.allclose(drift(1., model), [0.045 - 0.05, 0.02 - 0.05], rtol=0., atol=1e-15))
  with pytest.raises(ValueError):
    s_to_x([1., 0.], 0., spectral, model, contract)


def test_psi(two_assets):
  print("==========================================")
  print("= test_psi")
  model, contract, spectral = two_assets.model, two_assets.european, two_assets.spectral
  assert(payoff_phi([0.4, 0.8], contract) == pytest.approx(0.4))
  assert(payoff_phi([1.4, 0.8], contract) == 0.)
  s = np.array([0.7, 0.9])
  y = s_to_y(s, 0.3, spectral, model, contract)
  assert(psi(y, 0.3, spectral, model, contract) == pytest.approx(0.2, abs=1e-12))
  # no overflow near the faces of the unit cube
  assert(psi(np.array([1. - 1e-16, 0.5]), 0., spectral, model, contract) == 0.)


def test_segments(three_assets):
  print("==========================================")
  print("= test_segments")
  model, contract, spectral = three_assets
  point = EvaluationPoint.at_the_money(spectral, model, contract)
  Y0 = point.Y0
  assert(np.all((Y0 > 0.) & (Y0 < 1.)))
  u = np.array([0.1, 0.3, 0.5, 0.8])
  v = np.array([0.2, 0.6, 0.9])
  for segment in (Segment.line(Y0), Segment.plane(Y0, 1), Segment.plane(Y0, 2)):
    coords = (u,) if(segment.is_line()) else (u[:, None], v[None, :])
    values = segment.psi(coords, 0.25, spectral, model, contract)
    assert(values.shape == ((4,) if(segment.is_line()) else (4, 3)))
    for idx in np.ndindex(values.shape):
      free = (u[idx[0]],) if(segment.is_line()) else (u[idx[0]], v[idx[1]])
      expected = psi(segment.point(free), 0.25, spectral, model, contract)
      assert(abs(values[idx] - expected) <= 1e-12 * contract.K)
  ## the segment through Y0 contains Y0
  assert(np.array_equal(Segment.plane(Y0, 2).point((Y0[0], Y0[2])), Y0))
  with pytest.raises(ValueError):
    Segment(Y0, (0, 0))
  with pytest.raises(ValueError):
    EvaluationPoint([1., 1.], spectral, model, contract)


def test_boundary_values(two_assets):
  print("==========================================")
  print("= test_boundary_values")
  model, contract, spectral = two_assets.model, two_assets.bermudan, two_assets.spectral
  assert(spectral.column_class == (ColumnClass.ALL_POSITIVE, ColumnClass.MIXED))
  schedule = reversed_schedule(contract)
  K, r = contract.K, model.r
  tests = (
    (0, Side.LOW, 0.1, 1, K * np.exp(-r * 0.1)),
    (0, Side.LOW, 0.25, 1, K * np.exp(-r * 0.25)),
    (0, Side.LOW, 0.25, 2, K),                      # discount clock reset at alpha_1 = 0.25
    (0, Side.LOW, 0.6, 3, K * np.exp(-r * 0.1)),
    (0, Side.HIGH, 0.6, 3, 0.),
    (1, Side.LOW, 0.6, 3, 0.),
    (1, Side.HIGH, 0.6, 3, 0.),
  )
  for k, side, t, e, expected in tests:
    value = boundary_value(k, side, t, e, spectral, model, contract, schedule)
    assert(abs(value - expected) <= 1e-14)


def test_psi_limits():
  print("==========================================")
  print("= test_psi_limits")
  data = builtin_set("B")
  model = MarketModel(data["r"], data["sigma"], data["rho"])
  contract = BasketContract(data["K"], data["T"], data["omega"])
  spectral = SpectralModel.of_market(model)
  d = spectral.d
  for t in (0., 0.5, 1.):
    ## 1. y_1 -> 0 along the strictly positive first column: psi -> K
    values = []
    for y1 in (1e-2, 1e-4, 1e-6):
      y = np.full(d, 0.5)
      y[0] = y1
      values.append(psi(y, t, spectral, model, contract))
    assert(np.all(np.diff(values) >= 0.) and (values[0] < values[-1]))
    assert(abs(values[-1] - 40.) <= 1e-10)
    ## 2. y_k -> 1 in any direction: psi -> 0
    for k in range(d):
      y = np.full(d, 0.5)
      y[k] = 1. - 1e-6
      assert(psi(y, t, spectral, model, contract) == 0.)
