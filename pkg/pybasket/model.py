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
This file contains the financial inputs of the library:
 - `MarketModel`: asset count, risk-free rate, volatilities and correlations
 - `BasketContract`: strike, maturity, basket weights and exercise style
 - `ExerciseSchedule`: the exercise instants expressed in time-to-maturity
 - `SpectralModel`: the ordered eigendecomposition of the covariance matrix,
   with the sign classification of the eigenvectors that selects the Dirichlet data
All these objects are immutable after construction.
"""

import enum
import logging

import numpy as np

from pybasket.utils import readonly, as_vector, as_matrix
from pybasket.bs_result import check_errors__c, raise_if

logger = logging.getLogger(__name__)


SYMMETRY_TOL = 1e-12
WEIGHT_SUM_TOL = 1e-12
PSD_TOL = 1e-12
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


################################################################################
# market data
################################################################################

class MarketModel(object):
  """MarketModel(r, sigma, rho) -> MarketModel
The multivariate Black-Scholes market: `d` assets with volatilities `sigma`,
 correlation matrix `rho` and the risk-free rate `r`.
Raises ValueError listing all the inconsistencies of the input data.
  """
  __slots__ = ("d", "r", "sigma", "rho",)

  def __init__(self, r, sigma, rho):
    self.r = float(r)
    self.sigma = as_vector(sigma, "sigma")
    self.rho = as_matrix(rho, "rho")
    self.d = len(self.sigma)
    raise_if(self.check())

  def check(self):
    """check() -> check_errors__c
Returns all the inconsistencies of the market data
    """
    errors = check_errors__c()
    if(self.d < 2):
      errors.add("d", f"at least two assets are required (found {self.d})")
    if(not (np.isfinite(self.r) and (self.r >= 0.))):
      errors.add_invalid("r", self.r, "a finite rate >= 0")
    for i, s in enumerate(self.sigma):
      if(not (np.isfinite(s) and (s > 0.))):
        errors.add_invalid(f"sigma[{i}]", float(s), "a finite volatility > 0")
    if(self.rho.shape != (self.d, self.d)):
      errors.add("rho", f"expected a {self.d}x{self.d} matrix (found {self.rho.shape})")
      return errors
    if(np.max(np.abs(self.rho - self.rho.T)) > SYMMETRY_TOL):
      errors.add("rho", "the correlation matrix is not symmetric")
    if(np.any(np.abs(np.diag(self.rho) - 1.) > SYMMETRY_TOL)):
      errors.add("rho", "the correlation matrix must have a unit diagonal")
    if(np.any(np.abs(self.rho) > 1.)):
      errors.add("rho", "correlations must lie in [-1, 1]")
    if(not errors):
      try:
        spectral_decompose(build_covariance(self.sigma, self.rho))
      except (ValueError, ArithmeticError) as e:
        errors.add("rho", str(e))
    return errors

  def covariance(self):
    """covariance() -> np.ndarray
Returns the covariance matrix of the log-prices
    """
    return build_covariance(self.sigma, self.rho)

  def __repr__(self):
    return f"MarketModel(d={self.d}, r={self.r}, sigma={self.sigma.tolist()})"


################################################################################
# contract data
################################################################################

class Style(enum.Enum):
  EUROPEAN = "european"
  BERMUDAN = "bermudan"


class BasketContract(object):
  """BasketContract(K, T, omega) -> BasketContract
BasketContract(K, T, omega, style=Style.BERMUDAN, E=10) -> BasketContract
BasketContract(K, T, omega, style=Style.BERMUDAN, exercise_times=[...]) -> BasketContract
A basket put with strike `K`, maturity `T` (in years) and weights `omega`.
A Bermudan contract can be exercised at the increasing times tau_1 < ... < tau_E = T;
 when only `E` is given, the times are equidistant: tau_e = e T / E.
  """
  __slots__ = ("K", "T", "omega", "style", "E", "exercise_times",)

  def __init__(self, K, T, omega, style=Style.EUROPEAN, E=None, exercise_times=None):
    self.K = float(K)
    self.T = float(T)
    self.omega = as_vector(omega, "omega")
    self.style = Style(style)
    errors = check_errors__c()
    if(self.style is Style.EUROPEAN):
      self.E = 1
      self.exercise_times = readonly(np.array([self.T]))
    elif(exercise_times is not None):
      self.exercise_times = as_vector(exercise_times, "exercise_times")
      self.E = len(self.exercise_times)
      if((E is not None) and (E != self.E)):
        errors.add("E", f"E={E} does not match the {self.E} given exercise times")
    else:
      self.E = 10 if(E is None) else E
      if(isinstance(self.E, bool) or (not isinstance(self.E, (int, np.integer))) or (self.E < 1)):
        errors.add_invalid("E", self.E, "an exercise count >= 1")
        self.exercise_times = readonly(np.array([self.T]))
      else:
        taus = np.arange(1, self.E + 1) * (self.T / self.E)
        taus[-1] = self.T
        self.exercise_times = readonly(taus)
    errors.extend(self.check())
    raise_if(errors)

  def check(self):
    """check() -> check_errors__c
Returns all the inconsistencies of the contract data
    """
    errors = check_errors__c()
    if(not (np.isfinite(self.K) and (self.K > 0.))):
      errors.add_invalid("K", self.K, "a strike > 0")
    if(not (np.isfinite(self.T) and (self.T > 0.))):
      errors.add_invalid("T", self.T, "a maturity > 0")
    if(np.any(self.omega <= 0.)):
      errors.add("omega", "all the weights must be > 0")
    if(abs(float(np.sum(self.omega)) - 1.) > WEIGHT_SUM_TOL):
      errors.add("omega", f"the weights must sum to 1 (found {float(np.sum(self.omega))!r})")
    taus = self.exercise_times
    if(len(taus) >= 1):
      if(taus[0] <= 0.):
        errors.add("exercise_times", "the first exercise time must be > 0")
      if(np.any(np.diff(taus) <= 0.)):
        errors.add("exercise_times", "the exercise times must be increasing")
      if(abs(taus[-1] - self.T) > 1e-12 * self.T):
        errors.add("exercise_times", "the last exercise time must be the maturity")
    return errors

  @property
  def d(self): return len(self.omega)

  def is_bermudan(self): return (self.style is Style.BERMUDAN)

  def __repr__(self):
    return f"BasketContract(K={self.K}, T={self.T}, style={self.style.value}, E={self.E})"


class ExerciseSchedule(object):
  """ExerciseSchedule(alphas, T) -> ExerciseSchedule
The interior exercise instants alpha_1 < ... < alpha_{E-1}, in time-to-maturity.
The solution is continuous on the intervals ]alpha_{e-1}, alpha_e] with alpha_0 = 0 and alpha_E = T.
  """
  __slots__ = ("alphas", "T",)

  def __init__(self, alphas, T):
    self.alphas = as_vector(alphas, "alphas")
    self.T = float(T)
    if(len(self.alphas) > 0):
      if((self.alphas[0] <= 0.) or (self.alphas[-1] >= self.T) or np.any(np.diff(self.alphas) <= 0.)):
        raise ValueError(f"ERROR: exercise instants must be increasing inside ]0, {self.T}[ (found {self.alphas.tolist()})")

  def alpha(self, e):
    """alpha(int) -> float
Returns alpha_e for 0 <= e <= E (alpha_0 = 0, alpha_E = T)
    """
    if(e == 0): return 0.
    elif(e == len(self.alphas) + 1): return self.T
    elif(0 < e <= len(self.alphas)): return float(self.alphas[e - 1])
    raise IndexError(f"ERROR: exercise interval index {e} out of range [0, {len(self.alphas) + 1}]")

  @property
  def E(self): return len(self.alphas) + 1

  def __len__(self): return len(self.alphas)
  def __iter__(self): return iter(self.alphas)


def reversed_schedule(contract):
  """reversed_schedule(BasketContract) -> ExerciseSchedule
Returns the interior exercise instants alpha_e = T - tau_{E-e} for e = 1, ..., E-1
  """
  if(contract.E < 1):
    raise ValueError(f"ERROR: the exercise count must be >= 1 (found {contract.E})")
  if(not contract.is_bermudan()):
    return ExerciseSchedule((), contract.T)
  taus = contract.exercise_times
  E = len(taus)
  alphas = [contract.T - taus[E - e - 1] for e in range(1, E)]
  return ExerciseSchedule(alphas, contract.T)


################################################################################
# covariance and spectral decomposition
################################################################################

def build_covariance(sigma, rho):
  """build_covariance(np.ndarray, np.ndarray) -> np.ndarray
Returns the covariance matrix Sigma_ij = sigma_i rho_ij sigma_j
  """
  sigma = np.asarray(sigma, dtype=float)
  rho = np.asarray(rho, dtype=float)
  if((sigma.ndim != 1) or (rho.shape != (len(sigma), len(sigma)))):
    raise ValueError(f"ERROR: dimension mismatch between sigma {sigma.shape} and rho {rho.shape}")
  if(np.any(sigma <= 0.)):
    raise ValueError("ERROR: volatilities must be > 0")
  if(np.any(np.abs(np.diag(rho) - 1.) > SYMMETRY_TOL)):
    raise ValueError("ERROR: the correlation matrix must have a unit diagonal")
  res = sigma[:, None] * rho * sigma[None, :]
  # exact symmetry even when rho is only symmetric up to rounding
  return 0.5 * (res + res.T)


def _jacobi_rotate_(A, V, p, q):
  apq = A[p, q]
  if(apq == 0.):
    return
  tau = (A[q, q] - A[p, p]) / (2. * apq)
  t = (1. if(tau >= 0.) else -1.) / (abs(tau) + np.hypot(1., tau))
  c = 1. / np.hypot(1., t)
  s = t * c
  # A <- J^T A J, V <- V J with J the rotation in the (p, q) plane
  ap = A[:, p].copy()
  aq = A[:, q]
  A[:, p] = c * ap - s * aq
  A[:, q] = s * ap + c * aq
  ap = A[p, :].copy()
  aq = A[q, :]
  A[p, :] = c * ap - s * aq
  A[q, :] = s * ap + c * aq
  A[p, q] = A[q, p] = 0.
  vp = V[:, p].copy()
  vq = V[:, q]
  V[:, p] = c * vp - s * vq
  V[:, q] = s * vp + c * vq


def jacobi_eigen(Sigma, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
  """jacobi_eigen(np.ndarray) -> (np.ndarray, np.ndarray, int)
Cyclic Jacobi eigenvalue algorithm for a symmetric matrix.
Returns the (unsorted) eigenvalues, the orthogonal matrix of eigenvectors and the number of sweeps performed.
Stops when the Frobenius norm of the off-diagonal part is <= tol * ||Sigma||_F.
Raises ArithmeticError if this does not happen within `max_sweeps` sweeps.
  """
  A = np.array(Sigma, dtype=float)
  d = A.shape[0]
  V = np.eye(d)
  threshold = tol * np.linalg.norm(A)
  for sweep in range(max_sweeps + 1):
    off = np.linalg.norm(A - np.diag(np.diag(A)))
    if(off <= threshold):
      return np.diag(A).copy(), V, sweep
    if(sweep == max_sweeps): break
    for p in range(d - 1):
      for q in range(p + 1, d):
        _jacobi_rotate_(A, V, p, q)
  raise ArithmeticError(f"ERROR: Jacobi iteration did not converge in {max_sweeps} sweeps (off-diagonal norm {off:.3e})")


def normalize_signs(Q):
  """normalize_signs(np.ndarray) -> np.ndarray
Flips every column so that its entry of largest magnitude is positive (ties: lowest index)
  """
  Q = np.array(Q, dtype=float)
  idx = np.argmax(np.abs(Q), axis=0)
  signs = np.where(Q[idx, np.arange(Q.shape[1])] < 0., -1., 1.)
  return Q * signs[None, :]


def spectral_decompose(Sigma):
  """spectral_decompose(np.ndarray) -> (np.ndarray, np.ndarray)
Returns (Q, lambda) with Sigma = Q diag(lambda) Q^T, lambda sorted in descending order
 and the columns of Q sign-normalized.
Eigenvalues in [-1e-12, 0[ are clamped to zero; a more negative eigenvalue raises ValueError.
  """
  Sigma = np.asarray(Sigma, dtype=float)
  if((Sigma.ndim != 2) or (Sigma.shape[0] != Sigma.shape[1])):
    raise ValueError(f"ERROR: expected a square matrix (found shape {Sigma.shape})")
  if(np.max(np.abs(Sigma - Sigma.T), initial=0.) > SYMMETRY_TOL * max(1., np.max(np.abs(Sigma), initial=0.))):
    raise ValueError("ERROR: the covariance matrix is not symmetric")
  lam, V, sweeps = jacobi_eigen(Sigma)
  logger.debug(f"Jacobi converged in {sweeps} sweeps for d={Sigma.shape[0]}")
  order = np.argsort(-lam, kind="stable")
  lam = lam[order]
  Q = normalize_signs(V[:, order])
  if(np.any(lam < -PSD_TOL)):
    raise ValueError(f"ERROR: the covariance matrix is not positive semidefinite (smallest eigenvalue {lam[-1]:.3e})")
  lam = np.where(lam < 0., 0., lam)
  return Q, lam


class ColumnClass(enum.Enum):
  ALL_POSITIVE = "AllPositive"
  MIXED = "Mixed"


def classify_columns(Q):
  """classify_columns(np.ndarray) -> tuple[ColumnClass]
Tags every column of Q: ALL_POSITIVE if all its entries are > 0, MIXED if it has both a > 0 and a < 0 entry.
Raises ValueError if a column satisfies none of these two cases.
  """
  Q = np.asarray(Q, dtype=float)
  res = []
  errors = check_errors__c()
  for k in range(Q.shape[1]):
    col = Q[:, k]
    if(np.all(col > 0.)):
      res.append(ColumnClass.ALL_POSITIVE)
    elif(np.any(col > 0.) and np.any(col < 0.)):
      res.append(ColumnClass.MIXED)
    else:
      errors.add(f"Q[:, {k}]", f"column {col.tolist()} is neither strictly positive nor of mixed sign")
      res.append(None)
  raise_if(errors)
  return tuple(res)


class SpectralModel(object):
  """SpectralModel(Sigma) -> SpectralModel
The ordered spectral decomposition Sigma = Q diag(lambda) Q^T of a covariance matrix,
 with the classification of the columns of Q.
  """
  __slots__ = ("Sigma", "Q", "lam", "column_class",)

  def __init__(self, Sigma):
    self.Sigma = readonly(np.array(Sigma, dtype=float))
    Q, lam = spectral_decompose(self.Sigma)
    self.Q = readonly(Q)
    self.lam = readonly(lam)
    self.column_class = classify_columns(self.Q)

  @classmethod
  def of_market(cls, model):
    """of_market(MarketModel) -> SpectralModel"""
    return cls(model.covariance())

  @property
  def d(self): return len(self.lam)

  def __repr__(self):
    return f"SpectralModel(lambda={self.lam.tolist()}, classes={[c.value for c in self.column_class]})"
