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
This file contains the spatial discretization of the library:
 - the sinh-stretched mesh of [0, 1], concentrated around 1/2
 - the second-order finite difference weights on nonuniform meshes
 - the coefficients p and q of the PDE in the unit cube
 - the initial vectors of the time stepping, with cell averaging of psi near its kink
"""

import logging
from collections import namedtuple

import numpy as np

from pybasket.utils import readonly

logger = logging.getLogger(__name__)


KAPPA0 = 0.5
KAPPA1 = 1. / 40.
QUADRATURE_ORDER = 16
BISECTION_STEPS = 60


################################################################################
# finite difference weights
################################################################################

FdWeights = namedtuple("FdWeights", ("beta", "gamma"))
FdWeights.__doc__ = """First (beta) and second (gamma) derivative weights of the 3-point stencils.
The last axis of each array holds the weights of the nodes i-1, i and i+1."""


def fd_weights(h_left, h_right):
  """fd_weights(array, array) -> FdWeights
Returns the second-order weights of the first and second derivatives at a node
 whose left and right mesh widths are `h_left` and `h_right`.
Works on scalars as well as on arrays of widths.
  """
  h0 = np.asarray(h_left, dtype=float)
  h1 = np.asarray(h_right, dtype=float)
  if(np.any(h0 <= 0.) or np.any(h1 <= 0.)):
    raise ValueError("ERROR: mesh widths must be > 0")
  s = h0 + h1
  beta = np.stack((-h1 / (h0 * s), (h1 - h0) / (h0 * h1), h0 / (h1 * s)), axis=-1)
  gamma = np.stack((2. / (h0 * s), -2. / (h0 * h1), 2. / (h1 * s)), axis=-1)
  return FdWeights(beta, gamma)


def pq_coefficients(eta):
  """pq_coefficients(array) -> (array, array)
Returns p(eta) = sin^4(pi eta) / (2 pi^2) and q(eta) = sin^3(pi eta) cos(pi eta) / pi
  """
  eta = np.asarray(eta, dtype=float)
  s = np.sin(np.pi * eta)
  c = np.cos(np.pi * eta)
  return (s ** 4 / (2. * np.pi ** 2), s ** 3 * c / np.pi)


################################################################################
# mesh
################################################################################

class Mesh1D(object):
  """The mesh 0 = y_0 < y_1 < ... < y_{m+1} = 1 of one direction of the unit cube.
Built with `build_mesh`; `points` includes both boundary points,
 and `weights` holds the finite difference weights of the m interior points.
  """
  __slots__ = ("m", "points", "widths", "kappa0", "kappa1", "dxi", "weights",)

  def __init__(self, m, points, kappa0, kappa1, dxi):
    self.m = m
    self.points = readonly(points)
    self.widths = readonly(np.diff(points))
    self.kappa0 = kappa0
    self.kappa1 = kappa1
    self.dxi = dxi
    w = fd_weights(self.widths[:-1], self.widths[1:])
    self.weights = FdWeights(readonly(w.beta), readonly(w.gamma))

  @property
  def interior(self):
    """The m interior points y_1, ..., y_m"""
    return self.points[1:-1]

  def dual_edges(self):
    """dual_edges() -> np.ndarray
Returns the m+1 midpoints (y_{i-1} + y_i) / 2: the dual cell of the interior point y_i is [edges[i-1], edges[i]]
    """
    return 0.5 * (self.points[:-1] + self.points[1:])

  def __len__(self): return self.m

  def __repr__(self):
    return f"Mesh1D(m={self.m}, kappa1={self.kappa1})"


def build_mesh(m, kappa1=KAPPA1):
  """build_mesh(int) -> Mesh1D
build_mesh(int, float) -> Mesh1D
Returns the mesh y_i = kappa0 + kappa1 sinh(xi_i) with a uniform grid xi_0 = xi_min < ... < xi_{m+1} = xi_max,
 where xi_min = -asinh(kappa0 / kappa1) and xi_max = asinh((1 - kappa0) / kappa1), kappa0 = 1/2.
  """
  if(isinstance(m, bool) or (not isinstance(m, (int, np.integer))) or (m < 3)):
    raise ValueError(f"ERROR: a mesh needs at least 3 interior points (found {m})")
  if(not (kappa1 > 0.)):
    raise ValueError(f"ERROR: kappa1 must be > 0 (found {kappa1})")
  xi_max = np.arcsinh((1. - KAPPA0) / kappa1)
  xi_min = -np.arcsinh(KAPPA0 / kappa1)
  dxi = (xi_max - xi_min) / (m + 1)
  # xi_min = -xi_max when kappa0 = 1/2
  xi = xi_max * ((2. * np.arange(m + 2) - (m + 1)) / (m + 1))
  points = KAPPA0 + kappa1 * np.sinh(xi)
  points[0] = 0.
  points[-1] = 1.
  return Mesh1D(int(m), points, KAPPA0, float(kappa1), float(dxi))


################################################################################
# initial data
################################################################################

def nodal_initial(segment, meshes, t, spectral, model, contract):
  """nodal_initial(Segment, tuple[Mesh1D], float, SpectralModel, MarketModel, BasketContract) -> np.ndarray
Returns psi(., t) at the interior nodes of the segment (shape (m,) on a line, (m, m) on a plane)
  """
  coords = np.meshgrid(*(mesh.interior for mesh in meshes), indexing="ij")
  return segment.psi(tuple(coords), t, spectral, model, contract)


def _same_sign_(a, b):
  return (np.signbit(a) == np.signbit(b))

def _bisect_(lo, hi, g_lo, fn):
  """Vectorized bisection of fn on the intervals [lo, hi] (fn(lo) = g_lo)"""
  for _ in range(BISECTION_STEPS):
    mid = 0.5 * (lo + hi)
    g_mid = fn(mid)
    left = _same_sign_(g_mid, g_lo)
    lo = np.where(left, mid, lo)
    g_lo = np.where(left, g_mid, g_lo)
    hi = np.where(left, hi, mid)
  return 0.5 * (lo + hi)

def _average_1d_(a, b, kink, order):
  """Averages of max(kink, 0) on the intervals [a, b] (arrays of the same shape).
The intervals are split at their midpoint and at the roots of `kink` found in each half,
 and every piece is integrated with a Gauss-Legendre rule.
  """
  nodes, wts = np.polynomial.legendre.leggauss(order)
  c = 0.5 * (a + b)
  g_a, g_c, g_b = kink(a), kink(c), kink(b)
  r1 = np.where(_same_sign_(g_a, g_c), c, _bisect_(a, c, g_a, kink))
  r2 = np.where(_same_sign_(g_c, g_b), b, _bisect_(c, b, g_c, kink))
  total = np.zeros(np.shape(a))
  for p, q in ((a, r1), (r1, c), (c, r2), (r2, b)):
    half = 0.5 * (q - p)
    pts = (0.5 * (p + q))[..., None] + half[..., None] * nodes
    total = total + half * np.sum(wts * np.maximum(kink(pts), 0.), axis=-1)
  return total / (b - a)


def _flag_cells_(values):
  """Flags the cells where the given stack of kink values (first axis) has opposite signs"""
  return (np.min(values, axis=0) < 0.) & (np.max(values, axis=0) > 0.)


def cell_average_initial(segment, meshes, spectral, model, contract, order=QUADRATURE_ORDER):
  """cell_average_initial(Segment, tuple[Mesh1D], SpectralModel, MarketModel, BasketContract) -> np.ndarray
cell_average_initial(Segment, tuple[Mesh1D], SpectralModel, MarketModel, BasketContract, int) -> np.ndarray
Returns the initial vector Psi_0 on the interior nodes of the segment.
At the nodes whose dual cell contains the kink of psi(., 0) (sign change of K - sum_i omega_i s_i
 among the cell corners, center and node), the entry is the cell average of psi(., 0);
 elsewhere it is the nodal value.
  """
  meshes = tuple(meshes)
  if(len(meshes) != segment.ndim):
    raise ValueError(f"ERROR: expected {segment.ndim} meshes (found {len(meshes)})")
  res = nodal_initial(segment, meshes, 0., spectral, model, contract)

  def kink(*coords):
    return segment.kink(coords, 0., spectral, model, contract)

  if(segment.is_line()):
    (mesh,) = meshes
    edges = mesh.dual_edges()
    a, b = edges[:-1], edges[1:]
    g = np.stack((kink(a), kink(b), kink(0.5 * (a + b)), kink(mesh.interior)))
    flagged = np.flatnonzero(_flag_cells_(g))
    if(len(flagged) > 0):
      res[flagged] = _average_1d_(a[flagged], b[flagged], kink, order)
  else:
    mesh_u, mesh_v = meshes
    eu, ev = mesh_u.dual_edges(), mesh_v.dual_edges()
    g_edges = kink(eu[:, None], ev[None, :])
    cu, cv = 0.5 * (eu[:-1] + eu[1:]), 0.5 * (ev[:-1] + ev[1:])
    g = np.stack((
      g_edges[:-1, :-1], g_edges[1:, :-1], g_edges[:-1, 1:], g_edges[1:, 1:],
      kink(cu[:, None], cv[None, :]),
      kink(mesh_u.interior[:, None], mesh_v.interior[None, :]),
    ))
    iu, iv = np.nonzero(_flag_cells_(g))
    if(len(iu) > 0):
      nodes, wts = np.polynomial.legendre.leggauss(order)
      a_u, b_u = eu[iu], eu[iu + 1]
      a_v, b_v = ev[iv], ev[iv + 1]
      # outer Gauss rule in the first direction, kink-aware averages in the second one
      u = (0.5 * (a_u + b_u))[:, None] + (0.5 * (b_u - a_u))[:, None] * nodes
      inner = _average_1d_(
        np.broadcast_to(a_v[:, None], u.shape), np.broadcast_to(b_v[:, None], u.shape),
        lambda v: kink(u if(v.ndim == u.ndim) else u[..., None], v), order)
      res[iu, iv] = 0.5 * np.sum(wts * inner, axis=-1)
    flagged = iu
  logger.debug(f"{segment}: {len(flagged)} cells averaged")
  return res
