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
This file contains the time stepping of the library.
Each direction of a line or plane segment gets a tridiagonal operator (the discretized
 lambda_k [p d^2/dy^2 + q d/dy] - r_share) together with an affine term carrying the Dirichlet data.
Lines are advanced with Crank-Nicolson, planes with the Douglas ADI scheme (theta = 1/2);
 the first step after t = 0 and after every exercise date is replaced by two backward Euler half steps.
All the linear systems are tridiagonal, solved with LU factorizations computed once per operator.
"""

import logging
import warnings
from collections import namedtuple

import numpy as np

from pybasket.grid import KAPPA1, build_mesh, cell_average_initial, nodal_initial, pq_coefficients
from pybasket.transform import Side, boundary_value

logger = logging.getLogger(__name__)


BOUND_WARNING_FRACTION = 0.01
ALIGNMENT_TOL = 1e-9


################################################################################
# tridiagonal operators
################################################################################

def _to_front_(V, axis):
  return np.moveaxis(V, axis, 0)

def _along_(vec, axis, ndim):
  """Reshapes a vector so that it broadcasts along `axis` of an ndim-array"""
  shape = [1] * ndim
  shape[axis] = len(vec)
  return np.reshape(vec, shape)


class TridiagonalOperator(object):
  """TridiagonalOperator(lower, diag, upper) -> TridiagonalOperator
The m x m tridiagonal matrix with row i equal to (lower[i], diag[i], upper[i]) on the columns (i-1, i, i+1).
lower[0] and upper[m-1] are ignored (couplings to the boundary nodes belong to the affine boundary term).
The LU factorizations of the shifted matrices I - theta_dt A are cached by theta_dt.
  """
  __slots__ = ("lower", "diag", "upper", "m_lu_cache",)

  def __init__(self, lower, diag, upper):
    self.lower = np.array(lower, dtype=float)
    self.diag = np.array(diag, dtype=float)
    self.upper = np.array(upper, dtype=float)
    self.lower[0] = 0.
    self.upper[-1] = 0.
    for arr in (self.lower, self.diag, self.upper):
      arr.setflags(write=False)
    self.m_lu_cache = {}

  @property
  def m(self): return len(self.diag)

  def apply(self, V, axis=0):
    """apply(np.ndarray, int) -> np.ndarray
Returns A V, where A acts along `axis` of V
    """
    Vf = _to_front_(np.asarray(V, dtype=float), axis)
    extra = (slice(None),) + (None,) * (Vf.ndim - 1)
    res = self.diag[extra] * Vf
    res[1:] += self.lower[1:][extra] * Vf[:-1]
    res[:-1] += self.upper[:-1][extra] * Vf[1:]
    return np.moveaxis(res, 0, axis)

  def dense(self):
    """dense() -> np.ndarray
Returns the operator as a dense matrix
    """
    return np.diag(self.diag) + np.diag(self.lower[1:], -1) + np.diag(self.upper[:-1], 1)

  def factorize(self, theta_dt):
    """factorize(float) -> tuple[np.ndarray]
Returns the (cached) LU factorization of I - theta_dt A
    """
    res = self.m_lu_cache.get(theta_dt)
    if(res is None):
      logger.debug(f"LU factorization of I - {theta_dt:.3e} A (m={self.m})")
      res = thomas_factorize(-theta_dt * self.lower, 1. - theta_dt * self.diag, -theta_dt * self.upper)
      self.m_lu_cache[theta_dt] = res
    return res


def thomas_factorize(lower, diag, upper):
  """thomas_factorize(np.ndarray, np.ndarray, np.ndarray) -> (np.ndarray, np.ndarray, np.ndarray)
Returns the LU factorization (l, 1/u_diag, upper) of the tridiagonal matrix with the given diagonals.
Raises ArithmeticError on a zero pivot.
  """
  m = len(diag)
  l = np.zeros(m)
  piv = np.empty(m)
  piv[0] = diag[0]
  for i in range(1, m):
    if(piv[i - 1] == 0.):
      break
    l[i] = lower[i] / piv[i - 1]
    piv[i] = diag[i] - l[i] * upper[i - 1]
  if(np.any(piv == 0.) or not np.all(np.isfinite(piv))):
    raise ArithmeticError("ERROR: zero pivot in the tridiagonal factorization")
  return (l, 1. / piv, np.array(upper, dtype=float))


def thomas_apply(lu, rhs, axis=0):
  """thomas_apply(tuple, np.ndarray, int) -> np.ndarray
Solves the factorized tridiagonal system along `axis` of `rhs`
  """
  l, inv_piv, upper = lu
  y = np.array(_to_front_(np.asarray(rhs, dtype=float), axis))
  m = y.shape[0]
  for i in range(1, m):
    y[i] -= l[i] * y[i - 1]
  y[m - 1] *= inv_piv[m - 1]
  for i in range(m - 2, -1, -1):
    y[i] = (y[i] - upper[i] * y[i + 1]) * inv_piv[i]
  return np.moveaxis(y, 0, axis)


def thomas_solve(op, rhs, theta_dt, axis=0):
  """thomas_solve(TridiagonalOperator, np.ndarray, float, int) -> np.ndarray
Solves (I - theta_dt A) x = rhs along `axis`, reusing the cached factorization of the operator
  """
  return thomas_apply(op.factorize(theta_dt), rhs, axis)


################################################################################
# boundary terms
################################################################################

class AffineBoundaryTerm(object):
  """The time-dependent vector g(t) of the semidiscrete system W' = A W + g(t) of one direction:
its only nonzero entries are the first and last ones, the products of the finite difference weights
 reaching the boundary nodes with the Dirichlet values there.
The Dirichlet values are given as functions of (t, e), e being the current exercise interval.
  """
  __slots__ = ("m", "c_low", "c_high", "m_low", "m_high",)

  def __init__(self, m, c_low, c_high, low, high):
    self.m = m
    self.c_low = float(c_low)
    self.c_high = float(c_high)
    self.m_low = low
    self.m_high = high

  def __call__(self, t, e):
    res = np.zeros(self.m)
    res[0] = self.c_low * self.m_low(t, e)
    res[-1] += self.c_high * self.m_high(t, e)
    return res


def assemble_operator(mesh, lambda_k, r_share):
  """assemble_operator(Mesh1D, float, float) -> (TridiagonalOperator, function)
Returns the operator of one direction, whose row i is lambda_k [p(y_i) gamma_i + q(y_i) beta_i] - r_share e_i,
 and the factory `(low, high) -> AffineBoundaryTerm` building the boundary term of given Dirichlet data.
  """
  if(lambda_k < 0.):
    raise ValueError(f"ERROR: eigenvalues must be >= 0 (found {lambda_k})")
  p, q = pq_coefficients(mesh.interior)
  rows = lambda_k * (p[:, None] * mesh.weights.gamma + q[:, None] * mesh.weights.beta)
  op = TridiagonalOperator(rows[:, 0], rows[:, 1] - r_share, rows[:, 2])
  c_low, c_high = rows[0, 0], rows[-1, 2]

  def factory(low, high):
    return AffineBoundaryTerm(mesh.m, c_low, c_high, low, high)
  return op, factory


direction_cls = namedtuple("direction_cls", ("op", "boundary", "axis"))
direction_cls.__doc__ = "One direction of a segment: its operator, its boundary term and the array axis it acts on"


################################################################################
# grid functions
################################################################################

class GridFunction(object):
  """GridFunction(values, t, e) -> GridFunction
The values of a term on the interior nodes of its line (shape (m,)) or plane (shape (m, m)),
 at time-to-maturity `t`, in the exercise interval `e` (]alpha_{e-1}, alpha_e]).
  """
  __slots__ = ("values", "t", "e", "meshes",)

  def __init__(self, values, t, e, meshes=None):
    self.values = np.asarray(values, dtype=float)
    self.t = float(t)
    self.e = int(e)
    self.meshes = meshes

  @property
  def ndim(self): return self.values.ndim

  def check_bounds(self, K):
    """check_bounds(float) -> bool
Returns whether the values lie in [0, K] up to 1% of K; warns if they do not.
Raises ArithmeticError on non finite values.
    """
    if(not np.all(np.isfinite(self.values))):
      raise ArithmeticError(f"ERROR: non finite values in the grid function at t={self.t}")
    tol = BOUND_WARNING_FRACTION * K
    lo, hi = float(np.min(self.values)), float(np.max(self.values))
    if((lo < -tol) or (hi > K + tol)):
      msg = f"grid function values in [{lo:.6g}, {hi:.6g}] leave [0, {K:.6g}] at t={self.t}"
      logger.warning(msg)
      warnings.warn(msg, RuntimeWarning)
      return False
    return True

  def __repr__(self):
    return f"GridFunction(shape={self.values.shape}, t={self.t}, e={self.e})"


################################################################################
# time steps
################################################################################

def _forcing_(direction, V, t, e):
  return direction.op.apply(V, direction.axis) + _along_(direction.boundary(t, e), direction.axis, V.ndim)

def _douglas_(W, t, dt, directions, theta):
  """The Douglas scheme: explicit predictor, then one implicit corrector per direction"""
  V = W.values
  forcing = [_forcing_(d, V, t, W.e) for d in directions]
  Z = V + dt * sum(forcing)
  for d, F in zip(directions, forcing):
    g_new = _along_(d.boundary(t + dt, W.e), d.axis, V.ndim)
    rhs = Z - (theta * dt) * F + (theta * dt) * g_new
    Z = thomas_solve(d.op, rhs, theta * dt, d.axis)
  return GridFunction(Z, t + dt, W.e, W.meshes)


def douglas_step(W, t, dt, directions):
  """douglas_step(GridFunction, float, float, tuple[direction_cls]) -> GridFunction
One step of the Douglas ADI scheme with theta = 1/2:
  Z_0 = W + dt F(t, W),
  Z_j = Z_{j-1} + dt/2 (F_j(t+dt, Z_j) - F_j(t, W)),
 where F_j(t, V) = A_j V + g_j(t) and F = sum_j F_j; returns the last Z_j
  """
  return _douglas_(W, t, dt, directions, 0.5)


def cn_step(W, t, dt, direction):
  """cn_step(GridFunction, float, float, direction_cls) -> GridFunction
One Crank-Nicolson step: (I - dt/2 A) W_new = (I + dt/2 A) W + dt/2 (g(t) + g(t+dt))
  """
  V = W.values
  rhs = V + (0.5 * dt) * (_forcing_(direction, V, t, W.e)
                          + _along_(direction.boundary(t + dt, W.e), direction.axis, V.ndim))
  return GridFunction(thomas_solve(direction.op, rhs, 0.5 * dt, direction.axis), t + dt, W.e, W.meshes)


def damped_substeps(W, t, dt, directions):
  """damped_substeps(GridFunction, float, float, tuple[direction_cls]) -> GridFunction
Replaces the step from t to t+dt by two backward Euler half steps.
On a plane, each half step is the theta = 1 Douglas scheme (one tridiagonal solve per direction).
  """
  h = 0.5 * dt
  for n in range(2):
    W = _douglas_(W, t + n * h, h, directions, 1.)
  return W


def exercise_project(W, Psi_e):
  """exercise_project(GridFunction, np.ndarray) -> GridFunction
Returns the componentwise maximum of W and Psi_e, in the next exercise interval
  """
  Psi_e = np.asarray(Psi_e, dtype=float)
  if(Psi_e.shape != W.values.shape):
    raise ValueError(f"ERROR: shape mismatch in exercise projection ({W.values.shape} vs {Psi_e.shape})")
  return GridFunction(np.maximum(W.values, Psi_e), W.t, W.e + 1, W.meshes)


################################################################################
# term solve
################################################################################

def _step_of_(alpha, dt, T):
  n = int(round(alpha / dt))
  return n if(abs(n * dt - alpha) <= ALIGNMENT_TOL * T) else None


def is_aligned(schedule, N):
  """is_aligned(ExerciseSchedule, int) -> bool
Returns whether every exercise instant of the schedule is a point of the uniform time grid with N steps
  """
  dt = schedule.T / N
  return (N >= schedule.E) and all(_step_of_(alpha, dt, schedule.T) is not None for alpha in schedule)


def exercise_steps(schedule, N):
  """exercise_steps(ExerciseSchedule, int) -> dict[int, int]
Maps the time step index n_e with t_{n_e} = alpha_e to the exercise index e.
Raises ValueError if N < E or if an exercise instant is not a point of the time grid.
  """
  if(N < schedule.E):
    raise ValueError(f"ERROR: the number of time steps N={N} must be >= E={schedule.E}")
  dt = schedule.T / N
  res = {}
  for e, alpha in enumerate(schedule, start=1):
    n = _step_of_(alpha, dt, schedule.T)
    if(n is None):
      raise ValueError(f"ERROR: N={N} is not aligned with the exercise instant alpha_{e}={alpha}")
    res[n] = e
  return res


def term_directions(segment, mesh, spectral, model, contract, schedule):
  """term_directions(Segment, Mesh1D, SpectralModel, MarketModel, BasketContract, ExerciseSchedule) -> tuple[direction_cls]
Builds the operators and boundary terms of the directions of a segment.
The reaction term -r w is shared evenly by the directions.
  """
  r_share = model.r / segment.ndim
  res = []
  for axis, k in enumerate(segment.directions):
    op, factory = assemble_operator(mesh, spectral.lam[k], r_share)
    def low(t, e, k=k):
      return boundary_value(k, Side.LOW, t, e, spectral, model, contract, schedule)
    def high(t, e, k=k):
      return boundary_value(k, Side.HIGH, t, e, spectral, model, contract, schedule)
    res.append(direction_cls(op, factory(low, high), axis))
  return tuple(res)


def solve_term(segment, m, N, schedule, spectral, model, contract, kappa1=KAPPA1, on_exercise=None):
  """solve_term(Segment, int, int, ExerciseSchedule, SpectralModel, MarketModel, BasketContract) -> GridFunction
solve_term(..., kappa1=float, on_exercise=function) -> GridFunction
Solves the PDE of one PCA term on its segment with m interior points per direction and N time steps,
 and returns its values at t = T.
If given, `on_exercise(e, before, after)` is called at every exercise instant alpha_e
 with the grid values before and after the exercise projection.
  """
  steps = exercise_steps(schedule, N)
  mesh = build_mesh(m, kappa1)
  meshes = (mesh,) * segment.ndim
  directions = term_directions(segment, mesh, spectral, model, contract, schedule)
  dt = schedule.T / N

  W = GridFunction(cell_average_initial(segment, meshes, spectral, model, contract), 0., 1, meshes)
  damp = True
  for n in range(1, N + 1):
    t = (n - 1) * dt
    if(damp):
      W = damped_substeps(W, t, dt, directions)
      damp = False
    elif(segment.is_line()):
      W = cn_step(W, t, dt, directions[0])
    else:
      W = douglas_step(W, t, dt, directions)
    W.t = n * dt
    e = steps.get(n)
    if(e is not None):
      Psi_e = nodal_initial(segment, meshes, schedule.alpha(e), spectral, model, contract)
      before = W
      W = exercise_project(W, Psi_e)
      if(on_exercise is not None):
        on_exercise(e, before.values, W.values)
      damp = True
  W.t = schedule.T
  W.check_bounds(contract.K)
  return W
