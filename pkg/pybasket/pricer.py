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
This file contains the pricing entry points of the library.
The price of the basket put is approximated by
  w_tilde = w1 + sum_{l=2..d} (w1l_l - w1)
where w1 solves the PDE on the line of the first principal direction (all other eigenvalues set to 0),
 and w1l_l solves it on the plane of the first and l-th principal directions.
Every term is an independent task of a `tasks.TaskGraph`, and may be solved in a process pool.
"""

import logging
import math
import time
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from pybasket.grid import KAPPA1, build_mesh
from pybasket.model import reversed_schedule
from pybasket.solver import GridFunction, is_aligned, solve_term
from pybasket.tasks import TaskGraph, task_info_cls, task_ref_cls
from pybasket.transform import EvaluationPoint, Segment

logger = logging.getLogger(__name__)


M_MIN = 10
VALUE_TOL = 1e-6
MAX_STEP_FACTOR = 100


PricingReport = namedtuple("PricingReport", ("w1", "w1l", "w_tilde", "seconds", "m", "N"))
PricingReport.__doc__ = """The result of `price`:
  w1: the leading term at (Y0, T)
  w1l: the tuple of the d-1 plane terms at (Y0, T), for l = 2..d
  w_tilde: the combined value
  seconds: the wall-clock times of the terms (leading term first)
  m, N: the mesh size and number of time steps used"""


################################################################################
# interpolation at the evaluation point
################################################################################

def lagrange_weights(nodes, target):
  """lagrange_weights(array, float) -> np.ndarray
Returns the weights of the Lagrange interpolation polynomial through `nodes` evaluated at `target`
  """
  nodes = np.asarray(nodes, dtype=float)
  res = np.ones(len(nodes))
  for j in range(len(nodes)):
    for k in range(len(nodes)):
      if(k != j):
        res[j] *= (target - nodes[k]) / (nodes[j] - nodes[k])
  return res


def _stencil_(mesh, target):
  """Returns the start index in the interior points and the weights of the 4-point stencil around `target`"""
  y = mesh.interior
  if(not (y[0] < target < y[-1])):
    raise ValueError(f"ERROR: interpolation target {target} outside ]{y[0]}, {y[-1]}[")
  i = int(np.searchsorted(y, target))
  start = min(max(i - 2, 0), mesh.m - 4)
  return start, lagrange_weights(y[start:start + 4], target)


def interpolate_at(grid_fn, target, meshes=None):
  """interpolate_at(GridFunction, tuple[float]) -> float
interpolate_at(np.ndarray, tuple[float], tuple[Mesh1D]) -> float
Returns the value of the grid function at `target` (one coordinate per solved direction),
 with 4-point Lagrange interpolation per direction (tensor product on a plane).
  """
  if(isinstance(grid_fn, GridFunction)):
    values = grid_fn.values
    if(meshes is None):
      meshes = grid_fn.meshes
  else:
    values = np.asarray(grid_fn, dtype=float)
  target = tuple(float(t) for t in np.atleast_1d(target))
  if(meshes is None or len(meshes) != values.ndim or len(target) != values.ndim):
    raise ValueError(f"ERROR: expected {values.ndim} meshes and target coordinates")
  res = values
  # contract the last axis first
  for mesh, t in reversed(tuple(zip(meshes, target))):
    start, weights = _stencil_(mesh, t)
    res = res[..., start:start + 4] @ weights
  return float(res)


################################################################################
# term solves
################################################################################

def time_steps(contract, m):
  """time_steps(BasketContract, int) -> int
Returns the number of time steps used with m interior points: m for a European contract,
 and 2 E ceil(m / E) for a Bermudan one with equidistant exercise times.
For other exercise times, this is the smallest N >= 2 E ceil(m / E) whose time grid contains every exercise instant.
Raises ValueError if there is none below MAX_STEP_FACTOR times that bound.
  """
  if(not contract.is_bermudan()):
    return m
  base = 2 * contract.E * math.ceil(m / contract.E)
  schedule = reversed_schedule(contract)
  for N in range(base, MAX_STEP_FACTOR * base + 1):
    if(is_aligned(schedule, N)):
      if(N != base):
        logger.debug(f"N={N} time steps to reach the exercise instants (instead of {base})")
      return N
  raise ValueError(f"ERROR: no time grid with at most {MAX_STEP_FACTOR * base} steps contains the exercise times {contract.exercise_times.tolist()}")


def combine_terms(w1, w1l):
  """combine_terms(float, tuple[float]) -> float
Returns w1 + sum_l (w1l_l - w1), summed in increasing l
  """
  res = w1
  for v in w1l:
    res = res + (v - w1)
  return res


def _term_task_(directions, Y0, m, N, kappa1, spectral, model, contract):
  """Solves one term and returns its value at Y0 with the wall-clock time of the solve"""
  start = time.perf_counter()
  segment = Segment(Y0, directions)
  W = solve_term(segment, m, N, reversed_schedule(contract), spectral, model, contract, kappa1=kappa1)
  value = interpolate_at(W, [Y0[k] for k in directions])
  seconds = time.perf_counter() - start
  logger.debug(f"{segment}: value {value:.10g} in {seconds:.3f}s")
  return (value, seconds)


def _combine_task_(leading, *planes):
  return combine_terms(leading[0], tuple(p[0] for p in planes))


def _check_pricing_(spectral, m):
  if(isinstance(m, bool) or (not isinstance(m, (int, np.integer))) or (m < M_MIN)):
    raise ValueError(f"ERROR: the mesh size must be an integer >= {M_MIN} (found {m})")
  if(not (spectral.lam[0] > 0.)):
    raise ValueError(f"ERROR: the largest eigenvalue must be > 0 (found {spectral.lam[0]})")


def _evaluation_point_(S0, spectral, model, contract):
  if(S0 is None):
    return EvaluationPoint.at_the_money(spectral, model, contract)
  return EvaluationPoint(S0, spectral, model, contract)


def term_name(l=None):
  """term_name() -> str
term_name(int) -> str
Returns the task name of the leading term, or of the plane term of the 1-based direction `l`
  """
  return "w1" if(l is None) else f"w1_{l}"


def term_graph(Y0, m, N, kappa1, spectral, model, contract):
  """term_graph(array, int, int, float, SpectralModel, MarketModel, BasketContract) -> TaskGraph
Returns the graph of the d term solves followed by their combination (task "w_tilde")
  """
  graph = TaskGraph()
  args = (Y0, m, N, kappa1, spectral, model, contract)
  graph.add(task_info_cls(term_name(), _term_task_, ((0,),) + args))
  refs = [task_ref_cls(term_name())]
  for l in range(1, model.d):
    graph.add(task_info_cls(term_name(l + 1), _term_task_, ((0, l),) + args))
    refs.append(task_ref_cls(term_name(l + 1)))
  graph.add(task_info_cls("w_tilde", _combine_task_, tuple(refs)))
  return graph


def price(model, contract, spectral, m, S0=None, kappa1=KAPPA1, workers=1, executor=None):
  """price(MarketModel, BasketContract, SpectralModel, int) -> PricingReport
price(..., S0=array, kappa1=float, workers=int, executor=Executor) -> PricingReport
Computes the approximation w_tilde of the basket put price at the spot vector S0 (default (K, ..., K)).
With `workers > 1` (or a given `executor`), the terms are solved concurrently;
 the result does not depend on the execution order.
  """
  _check_pricing_(spectral, m)
  point = _evaluation_point_(S0, spectral, model, contract)
  N = time_steps(contract, m)
  logger.info(f"pricing d={model.d} {contract.style.value} put with m={m}, N={N}")
  graph = term_graph(point.Y0, m, N, kappa1, spectral, model, contract)

  if((executor is None) and (workers > 1)):
    with ProcessPoolExecutor(max_workers=workers) as pool:
      results = graph.run(pool)
  else:
    results = graph.run(executor)

  w1, s1 = results[term_name()]
  planes = [results[term_name(l + 1)] for l in range(1, model.d)]
  report = PricingReport(
    w1, tuple(v for v, _ in planes), results["w_tilde"],
    (s1,) + tuple(s for _, s in planes), m, N)
  for v in (report.w1,) + report.w1l:
    if((v < -VALUE_TOL * contract.K) or (v > contract.K * (1. + VALUE_TOL))):
      logger.warning(f"term value {v} outside [0, {contract.K}]")
  logger.info(f"w_tilde = {report.w_tilde:.10g} (w1 = {report.w1:.10g}) in {sum(report.seconds):.2f}s")
  return report


def leading_term_reference(model, contract, spectral, m, S0=None, kappa1=KAPPA1):
  """leading_term_reference(MarketModel, BasketContract, SpectralModel, int) -> float
Returns the leading term w1 alone, equal to `price(...).w1`, without solving the plane terms
  """
  _check_pricing_(spectral, m)
  point = _evaluation_point_(S0, spectral, model, contract)
  value, _ = _term_task_((0,), point.Y0, m, time_steps(contract, m), kappa1, spectral, model, contract)
  return value


################################################################################
# exercise consistency
################################################################################

def exercise_consistency_diagnostic(model, contract, spectral, m, e, probes, S0=None, kappa1=KAPPA1):
  """exercise_consistency_diagnostic(MarketModel, BasketContract, SpectralModel, int, int, array) -> np.ndarray
Returns, at each probe coordinate y on the line of the first principal direction,
  w_tilde(y, alpha_e) - max(psi(y, alpha_e), w_tilde(y, alpha_e^-))
 where w_tilde(., alpha_e^-) combines the term values just before the exercise projection at alpha_e,
 and w_tilde(., alpha_e) those just after. The combined approximation does not satisfy the exercise
 condition in general, although every term does.
For a European contract, the result is 0.
  """
  probes = np.atleast_1d(np.asarray(probes, dtype=float))
  if(not contract.is_bermudan()):
    return np.zeros(len(probes))
  _check_pricing_(spectral, m)
  schedule = reversed_schedule(contract)
  if(isinstance(e, bool) or not (1 <= e <= len(schedule))):
    raise ValueError(f"ERROR: the exercise index must be in [1, {len(schedule)}] (found {e})")
  point = _evaluation_point_(S0, spectral, model, contract)
  Y0 = point.Y0
  N = time_steps(contract, m)
  mesh = build_mesh(m, kappa1)

  # 1. solve every term, capturing both sides of the projection at alpha_e
  before, after = [], []
  for l in range(model.d):
    directions = (0,) if(l == 0) else (0, l)
    captured = {}
    def hook(index, pre, post, captured=captured):
      if(index == e):
        captured["pre"], captured["post"] = np.array(pre), np.array(post)
    solve_term(Segment(Y0, directions), m, N, schedule, spectral, model, contract, kappa1=kappa1, on_exercise=hook)
    meshes = (mesh,) * len(directions)
    fixed = [Y0[k] for k in directions[1:]]
    before.append([interpolate_at(captured["pre"], [y] + fixed, meshes) for y in probes])
    after.append([interpolate_at(captured["post"], [y] + fixed, meshes) for y in probes])

  # 2. combine and compare with the exercise value
  before, after = np.array(before), np.array(after)
  w_before = combine_terms(before[0], tuple(before[1:]))
  w_after = combine_terms(after[0], tuple(after[1:]))
  psi_e = Segment.line(Y0).psi((probes,), schedule.alpha(e), spectral, model, contract)
  return w_after - np.maximum(psi_e, w_before)
