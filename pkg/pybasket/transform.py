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
This file contains the coordinate maps of the library.
Prices s are mapped to the decorrelated log coordinates x = Q^T (ln(s/K) - b(t)),
 which are in turn mapped onto the unit cube by y = arctan(x)/pi + 1/2.
It also contains the transformed payoff psi, the Dirichlet data on the faces of the unit cube,
 and the `Segment` class that evaluates psi on the line and the planes through the evaluation point.
"""

import enum

import numpy as np

from pybasket.utils import readonly
from pybasket.model import ColumnClass, reversed_schedule

EXPONENT_CLAMP = 700.


################################################################################
# coordinate maps
################################################################################

def drift(t, model):
  """drift(float, MarketModel) -> np.ndarray
Returns b(t) with b_i(t) = (sigma_i^2 / 2 - r) t
  """
  return (0.5 * model.sigma ** 2 - model.r) * t

def x_of_y(y):
  """x_of_y(array) -> array
Inverse of the unit cube map: x = tan(pi (y - 1/2))
  """
  return np.tan(np.pi * (np.asarray(y, dtype=float) - 0.5))

def y_of_x(x):
  """y_of_x(array) -> array
Maps the real line onto ]0, 1[: y = arctan(x) / pi + 1/2
  """
  return np.arctan(np.asarray(x, dtype=float)) / np.pi + 0.5

def s_to_x(s, t, spectral, model, contract):
  """s_to_x(array, float, SpectralModel, MarketModel, BasketContract) -> np.ndarray
Returns x = Q^T (ln(s/K) - b(t)); the last axis of `s` indexes the assets
  """
  s = np.asarray(s, dtype=float)
  if(np.any(s <= 0.)):
    raise ValueError("ERROR: all prices must be > 0")
  return (np.log(s / contract.K) - drift(t, model)) @ spectral.Q

def s_to_y(s, t, spectral, model, contract):
  """s_to_y(array, float, SpectralModel, MarketModel, BasketContract) -> np.ndarray
Returns the image of the price vector(s) `s` in the unit cube at time-to-maturity `t`
  """
  return y_of_x(s_to_x(s, t, spectral, model, contract))

def _exp_clamped_(z):
  return np.exp(np.clip(z, -EXPONENT_CLAMP, EXPONENT_CLAMP))

def x_to_s(x, t, spectral, model, contract):
  """x_to_s(array, float, SpectralModel, MarketModel, BasketContract) -> np.ndarray
Returns s = K exp(Q x + b(t)), with exponents clamped to +-700
  """
  x = np.asarray(x, dtype=float)
  return contract.K * _exp_clamped_(x @ spectral.Q.T + drift(t, model))

def y_to_s(y, t, spectral, model, contract):
  """y_to_s(array, float, SpectralModel, MarketModel, BasketContract) -> np.ndarray"""
  return x_to_s(x_of_y(y), t, spectral, model, contract)


################################################################################
# payoff
################################################################################

def payoff_phi(s, contract):
  """payoff_phi(array, BasketContract) -> array
The basket put payoff max(K - sum_i omega_i s_i, 0); the last axis of `s` indexes the assets
  """
  s = np.asarray(s, dtype=float)
  return np.maximum(contract.K - s @ contract.omega, 0.)

def psi(y, t, spectral, model, contract):
  """psi(array, float, SpectralModel, MarketModel, BasketContract) -> array
The payoff in the unit cube: psi(y, t) = phi(K exp[Q x + b(t)]) with x = tan(pi (y - 1/2)).
`y` must lie strictly inside the unit cube; its last axis indexes the directions.
  """
  with np.errstate(over="ignore"):
    return payoff_phi(y_to_s(y, t, spectral, model, contract), contract)


################################################################################
# boundary data
################################################################################

class Side(enum.Enum):
  LOW = 0
  HIGH = 1


def boundary_value(k, side, t, e, spectral, model, contract, schedule=None):
  """boundary_value(int, Side, float, int, SpectralModel, MarketModel, BasketContract) -> float
Dirichlet value on the face y_k = 0 (Side.LOW) or y_k = 1 (Side.HIGH), for t in ]alpha_{e-1}, alpha_e].
Directions `k` are 0-based. The value is K exp(-r (t - alpha_{e-1})) on the low face of a direction
 whose eigenvector has only positive entries, and 0 everywhere else.
  """
  if((side is Side.HIGH) or (spectral.column_class[k] is not ColumnClass.ALL_POSITIVE)):
    return 0.
  if(schedule is None):
    schedule = reversed_schedule(contract)
  return contract.K * np.exp(-model.r * (t - schedule.alpha(e - 1)))


################################################################################
# evaluation point
################################################################################

class EvaluationPoint(object):
  """EvaluationPoint(S0, spectral, model, contract) -> EvaluationPoint
The image Y0 = y(x(S0, T)) of the spot price vector S0 in the unit cube
  """
  __slots__ = ("Y0", "S0",)

  def __init__(self, S0, spectral, model, contract):
    self.S0 = readonly(np.array(S0, dtype=float))
    if(self.S0.shape != (model.d,)):
      raise ValueError(f"ERROR: the spot vector must have {model.d} entries (found shape {self.S0.shape})")
    self.Y0 = readonly(s_to_y(self.S0, contract.T, spectral, model, contract))
    if(np.any(self.Y0 <= 0.) or np.any(self.Y0 >= 1.)):
      raise ValueError(f"ERROR: the evaluation point {self.Y0.tolist()} is not strictly inside the unit cube")

  @classmethod
  def at_the_money(cls, spectral, model, contract):
    """at_the_money(SpectralModel, MarketModel, BasketContract) -> EvaluationPoint
The evaluation point of the spot vector S0 = (K, ..., K)
    """
    return cls(np.full(model.d, contract.K), spectral, model, contract)


################################################################################
# line and plane segments through the evaluation point
################################################################################

class Segment(object):
  """Segment(Y0, directions) -> Segment
The line (one direction) or plane (two directions) segment through Y0 in the unit cube,
 where the coordinates of the other directions are frozen at their value in Y0.
Directions are 0-based: the line L1 is `Segment(Y0, (0,))`, the plane P_l is `Segment(Y0, (0, l-1))`.
  """
  __slots__ = ("Y0", "directions",)

  def __init__(self, Y0, directions):
    self.Y0 = readonly(np.array(Y0, dtype=float))
    self.directions = tuple(int(k) for k in directions)
    if((len(self.directions) not in (1, 2)) or (len(set(self.directions)) != len(self.directions))):
      raise ValueError(f"ERROR: a segment has one or two distinct directions (found {directions})")

  @classmethod
  def line(cls, Y0):
    return cls(Y0, (0,))

  @classmethod
  def plane(cls, Y0, l):
    """plane(array, int) -> Segment
The plane spanned by the first direction and the 0-based direction `l`
    """
    return cls(Y0, (0, l))

  @property
  def ndim(self): return len(self.directions)

  def is_line(self): return (self.ndim == 1)

  def _exponents_(self, coords, t, spectral, model):
    """Returns the fixed part of the exponent Q x + b(t), and the list of (column, x_k) of the free directions"""
    x_fixed = x_of_y(self.Y0)
    for k in self.directions:
      x_fixed[k] = 0.
    base = spectral.Q @ x_fixed + drift(t, model)
    free = [(spectral.Q[:, k], x_of_y(c)) for k, c in zip(self.directions, coords)]
    return base, free

  def basket(self, coords, t, spectral, model, contract):
    """basket(tuple[array], float, SpectralModel, MarketModel, BasketContract) -> array
Returns sum_i omega_i s_i at the points of the segment whose free coordinates are given by `coords`
 (one array per direction, broadcast together)
    """
    if(len(coords) != self.ndim):
      raise ValueError(f"ERROR: expected {self.ndim} coordinate arrays (found {len(coords)})")
    base, free = self._exponents_(coords, t, spectral, model)
    shape = np.broadcast_shapes(*(np.shape(x) for _, x in free))
    res = np.zeros(shape)
    with np.errstate(over="ignore"):
      for i in range(model.d):
        z = base[i]
        for col, x in free:
          z = z + col[i] * x
        res = res + contract.omega[i] * contract.K * _exp_clamped_(z)
    return res

  def kink(self, coords, t, spectral, model, contract):
    """kink(tuple[array], float, SpectralModel, MarketModel, BasketContract) -> array
Returns K - sum_i omega_i s_i, whose zero set is the locus of nonsmoothness of psi
    """
    return contract.K - self.basket(coords, t, spectral, model, contract)

  def psi(self, coords, t, spectral, model, contract):
    """psi(tuple[array], float, SpectralModel, MarketModel, BasketContract) -> array
Returns psi(y, t) at the points of the segment whose free coordinates are given by `coords`
    """
    return np.maximum(self.kink(coords, t, spectral, model, contract), 0.)

  def point(self, coords):
    """point(tuple[float]) -> np.ndarray
Returns the full point of the unit cube corresponding to the given free coordinates
    """
    res = np.array(self.Y0)
    for k, c in zip(self.directions, coords):
      res[k] = c
    return res

  def __repr__(self):
    return f"Segment(directions={self.directions})"
