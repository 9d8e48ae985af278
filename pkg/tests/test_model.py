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

from pybasket.model import *
from pybasket.bs_configuration import builtin_set


def _market_of_set_(name):
  data = builtin_set(name)
  return MarketModel(data["r"], data["sigma"], data["rho"])


def test_spectral_builtin_sets():
  print("==========================================")
  print("= test_spectral_builtin_sets")
  ## 1. set A
  spectral = SpectralModel.of_market(_market_of_set_("A"))
  assert(np.allclose(spectral.lam, (1.4089, 0.1124, 0.1006, 0.0388, 0.0213), rtol=0., atol=1e-4))
  ## 2. sets B and C: one large eigenvalue, the others equal
  for name, d, lam1 in (("B", 10, 0.13), ("C", 15, 0.18)):
    spectral = SpectralModel.of_market(_market_of_set_(name))
    assert(spectral.d == d)
    assert(abs(spectral.lam[0] - lam1) <= 1e-12)
    assert(np.all(np.abs(spectral.lam[1:] - 0.03) <= 1e-12))
    assert(spectral.column_class[0] is ColumnClass.ALL_POSITIVE)
    assert(all(c is ColumnClass.MIXED for c in spectral.column_class[1:]))
    assert(np.allclose(spectral.Q[:, 0], np.full(d, 1. / np.sqrt(d)), rtol=0., atol=1e-12))


def test_spectral_decomposition():
  print("==========================================")
  print("= test_spectral_decomposition")
  rng = np.random.default_rng(1234)
  for d in (2, 3, 5, 8):
    B = rng.normal(size=(d, d))
    Sigma = B @ B.T + 0.1 * np.eye(d)
    Q, lam = spectral_decompose(Sigma)
    # 1. orthogonality and reconstruction
    assert(np.allclose(Q.T @ Q, np.eye(d), rtol=0., atol=1e-12))
    assert(np.allclose(Q @ np.diag(lam) @ Q.T, Sigma, rtol=0., atol=1e-12 * np.linalg.norm(Sigma)))
    # 2. ordering, and agreement with a library eigensolver
    assert(np.all(np.diff(lam) <= 0.))
    assert(np.allclose(lam, np.sort(np.linalg.eigvalsh(Sigma))[::-1], rtol=1e-12, atol=1e-12))
    # 3. sign normalization
    for k in range(d):
      assert(Q[np.argmax(np.abs(Q[:, k])), k] > 0.)


def test_spectral_large_dimensions():
  print("==========================================")
  print("= test_spectral_large_dimensions")
  rng = np.random.default_rng(4321)
  for d in (12, 25, 50):
    B = rng.normal(size=(d, d))
    Sigma = B @ B.T / d + 0.05 * np.eye(d)
    Q, lam = spectral_decompose(Sigma)
    assert(np.max(np.abs(Q @ np.diag(lam) @ Q.T - Sigma)) <= 1e-10)
    assert(np.max(np.abs(Q.T @ Q - np.eye(d))) <= 1e-10)
    # the trace is preserved
    assert(abs(np.sum(lam) - np.trace(Sigma)) <= 1e-12 * np.trace(Sigma))
    # sign normalization is idempotent
    assert(np.array_equal(normalize_signs(Q), Q))
    flipped = Q * np.where(np.arange(d) % 2 == 0, -1., 1.)[None, :]
    once = normalize_signs(flipped)
    assert(np.array_equal(once, Q))
    assert(np.array_equal(normalize_signs(once), once))

def test_jacobi():
  print("==========================================")
  print("= test_jacobi")
  lam, V, sweeps = jacobi_eigen(np.diag([3., 1., 2.]))
  assert(sweeps == 0)
  assert(np.array_equal(lam, [3., 1., 2.]))
  lam, V, sweeps = jacobi_eigen(np.array([[2., 1.], [1., 2.]]))
  assert(np.allclose(np.sort(lam), [1., 3.], rtol=0., atol=1e-14))
  with pytest.raises(ArithmeticError):
    jacobi_eigen(np.array([[2., 1.], [1., 2.]]), max_sweeps=0)


def test_psd_and_symmetry():
  print("==========================================")
  print("= test_psd_and_symmetry")
  with pytest.raises(ValueError):
    spectral_decompose(np.array([[1., 2.], [2., 1.]]))
  with pytest.raises(ValueError):
    spectral_decompose(np.array([[1., 0.5], [0.4, 1.]]))
  # a tiny negative eigenvalue is clamped to zero
  Q, lam = spectral_decompose(np.array([[1., 1. + 1e-13], [1. + 1e-13, 1.]]))
  assert(lam[-1] == 0.)


def test_classify_columns():
  print("==========================================")
  print("= test_classify_columns")
  Q = np.array([[0.6, 0.8], [0.8, -0.6]])
  assert(classify_columns(Q) == (ColumnClass.ALL_POSITIVE, ColumnClass.MIXED))
  with pytest.raises(ValueError):
    classify_columns(np.eye(2))
  # zeros are allowed in a mixed column only
  Q = np.array([[0.5, 0.5], [0.5, -0.5], [0.7, 0.]])
  assert(classify_columns(Q) == (ColumnClass.ALL_POSITIVE, ColumnClass.MIXED))
  for Q in (np.array([[1.], [0.]]), np.zeros((2, 1))):
    with pytest.raises(ValueError):
      classify_columns(Q)


def test_market_model():
  print("==========================================")
  print("= test_market_model")
  model = MarketModel(0.05, [0.3, 0.2], [[1., 0.5], [0.5, 1.]])
  assert(model.d == 2)
  assert(np.allclose(model.covariance(), [[0.09, 0.03], [0.03, 0.04]], rtol=0., atol=1e-15))
  tests = (
    (0.05, [0.3], [[1.]]),                                       # one asset
    (-0.01, [0.3, 0.2], [[1., 0.5], [0.5, 1.]]),                 # negative rate
    (0.05, [0.3, 0.], [[1., 0.5], [0.5, 1.]]),                   # zero volatility
    (0.05, [0.3, 0.2], [[1., 0.5], [0.4, 1.]]),                  # not symmetric
    (0.05, [0.3, 0.2], [[0.9, 0.5], [0.5, 1.]]),                 # not a unit diagonal
    (0.05, [0.3, 0.2, 0.1], [[1., 0.5], [0.5, 1.]]),             # size mismatch
    (0.05, [0.3, 0.2, 0.1], [[1., 0.9, -0.9], [0.9, 1., 0.9], [-0.9, 0.9, 1.]]),  # not PSD
  )
  for r, sigma, rho in tests:
    with pytest.raises(ValueError):
      MarketModel(r, sigma, rho)


def test_basket_contract():
  print("==========================================")
  print("= test_basket_contract")
  contract = BasketContract(40., 1., [0.5, 0.5])
  assert((contract.E == 1) and (not contract.is_bermudan()))
  assert(np.array_equal(contract.exercise_times, [1.]))

  contract = BasketContract(40., 1., [0.5, 0.5], style=Style.BERMUDAN)
  assert(contract.E == 10)
  assert(np.allclose(contract.exercise_times, np.arange(1, 11) / 10., rtol=0., atol=1e-15))
  assert(contract.exercise_times[-1] == 1.)

  contract = BasketContract(40., 2., [0.5, 0.5], style="bermudan", exercise_times=[0.5, 1.5, 2.])
  assert(contract.E == 3)

  tests = (
    dict(K=0., T=1., omega=[0.5, 0.5]),
    dict(K=1., T=-1., omega=[0.5, 0.5]),
    dict(K=1., T=1., omega=[0.5, 0.6]),
    dict(K=1., T=1., omega=[1.5, -0.5]),
    dict(K=1., T=1., omega=[0.5, 0.5], style=Style.BERMUDAN, E=0),
    dict(K=1., T=1., omega=[0.5, 0.5], style=Style.BERMUDAN, exercise_times=[0.5, 0.9]),
    dict(K=1., T=1., omega=[0.5, 0.5], style=Style.BERMUDAN, exercise_times=[0.6, 0.5, 1.]),
  )
  for kwargs in tests:
    with pytest.raises(ValueError):
      BasketContract(**kwargs)


def test_reversed_schedule():
  print("==========================================")
  print("= test_reversed_schedule")
  ## 1. european: no interior exercise instant
  schedule = reversed_schedule(BasketContract(1., 1., [0.5, 0.5]))
  assert((len(schedule) == 0) and (schedule.E == 1))
  assert((schedule.alpha(0) == 0.) and (schedule.alpha(1) == 1.))

  ## 2. equidistant bermudan
  schedule = reversed_schedule(BasketContract(1., 1., [0.5, 0.5], style=Style.BERMUDAN, E=10))
  assert(schedule.E == 10)
  assert(np.allclose(list(schedule), np.arange(1, 10) / 10., rtol=0., atol=1e-15))
  assert(schedule.alpha(10) == 1.)
  with pytest.raises(IndexError):
    schedule.alpha(11)

  ## 3. generic exercise times
  schedule = reversed_schedule(BasketContract(1., 2., [0.5, 0.5], style=Style.BERMUDAN, exercise_times=[0.5, 1.5, 2.]))
  assert(np.allclose(list(schedule), [0.5, 1.5], rtol=0., atol=1e-15))
