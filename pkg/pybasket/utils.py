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
Small helpers shared by the whole library:
 - the empty object (for lookups where None is a valid value)
 - numeric intervals and domains, used by the value specifications of `bs_attributes`
 - conversion of user data into read-only numpy arrays
"""

import numpy as np


##########################################
# the empty object, for get API

class _empty_c__(object):
  """Class for the object corresponding to the empty value (in case None can be a value)"""
  __slots__ = ()
  def __str__(self): return "_empty__"
  def __repr__(self): return "_empty__"

"""The empty object"""
_empty__ = _empty_c__()


################################################################################
# intervals and domains
################################################################################

float_inf_minus = float("-inf")
float_inf_plus  = float("inf")

def is_valid_bound(v):
  """is_valid_bound(object) -> bool
returns if the object in parameter is a valid bound (either int or a float, bool excluded)
  """
  return isinstance(v, (int, float,)) and not isinstance(v, bool)

def is_valid_bound_ext(v):
  """is_valid_bound_ext(object) -> bool
returns if the object in parameter is a valid extended bound (either int, float or None for infinity)
  """
  return ((v is None) or is_valid_bound(v))


def _nf_of_bound_(b, is_min):
  if(b is None):
    if(is_min): return float_inf_minus
    else: return float_inf_plus
  else:
    return b


def _interval_error_(obj): return ValueError(f"ERROR: an interval must be a pair (a,b) with a<=b (found {obj})")

class interval__c(tuple):
  """interval__c(a, b) -> interval__c
interval__c(a, b, closed=(bool, bool)) -> interval__c
A real interval. `None` as a bound means infinity.
By default the interval is closed on the left and open on the right, i.e., [a, b[
  """
  __slots__ = ()
  def __new__(cls, v_min, v_max, closed=(True, False)):
    v_min = _nf_of_bound_(v_min, True)
    v_max = _nf_of_bound_(v_max, False)
    if(is_valid_bound(v_min) and  is_valid_bound(v_max) and (v_min <= v_max)):
      return tuple.__new__(interval__c, (v_min, v_max, bool(closed[0]), bool(closed[1])))
    else: raise _interval_error_((v_min, v_max))

  def contains(self, value):
    v_min, v_max, c_min, c_max = self
    above = (v_min <= value) if(c_min) else (v_min < value)
    below = (value <= v_max) if(c_max) else (value < v_max)
    return (above and below)
  def __str__(self):
    left  = "[" if(self[2] and (self[0] != float_inf_minus)) else "]"
    right = "]" if(self[3] and (self[1] != float_inf_plus)) else "["
    return f"{left}{self[0]}, {self[1]}{right}"

def interval_min(v): return v[0]

def interval_of_obj(obj):
  if(isinstance(obj, interval__c)): return obj
  elif(is_valid_bound(obj)): return interval__c(obj, obj, closed=(True, True))
  elif(isinstance(obj, (list, tuple)) and (len(obj) == 2)):
    return interval__c(obj[0], obj[1])
  elif(isinstance(obj, (list, tuple)) and (len(obj) == 3)):
    return interval__c(obj[0], obj[1], obj[2])
  else:
    raise _interval_error_(obj)


class domain__c(tuple):
  """domain__c(a, b) -> domain__c
domain__c(interval, interval, ...) -> domain__c
A union of intervals; the empty domain means the whole real line.
Intervals are given either as interval__c objects, as pairs (a, b) meaning [a, b[,
 or as triples (a, b, (closed_left, closed_right)).
  """
  __slots__ = ()
  def __new__(cls, *args):
    if((len(args) == 2) and (is_valid_bound_ext(args[0])) and (is_valid_bound_ext(args[1]))):
      args = (interval__c(args[0], args[1]),)
    return tuple.__new__(domain__c, sorted((interval_of_obj(arg) for arg in args), key=interval_min))
  def contains(self, value):
    if(bool(self)):
      return any(i.contains(value) for i in self)
    else: return True
  def __str__(self):
    if(bool(self)):
      return " ∪ ".join(map(str, self))
    else:
      return "]-inf, inf["

"""Frequently used domains"""
positive_reals = domain__c((0, None, (False, False)))
unit_interval = domain__c((-1, 1, (True, True)))


################################################################################
# numpy helpers
################################################################################

def readonly(array):
  """readonly(np.ndarray) -> np.ndarray
Returns the array in parameter after having made it immutable
  """
  array.setflags(write=False)
  return array

def as_vector(data, name="vector"):
  """as_vector(iterable[float], str) -> np.ndarray
Copies the data into a new read-only float vector; raises ValueError if the data is not one-dimensional
  """
  res = np.array(data, dtype=float)
  if(res.ndim != 1):
    raise ValueError(f"ERROR: {name} must be one-dimensional (found shape {res.shape})")
  return readonly(res)

def as_matrix(data, name="matrix"):
  """as_matrix(iterable[iterable[float]], str) -> np.ndarray
Copies the data into a new read-only square float matrix; raises ValueError if the data is not a square matrix
  """
  res = np.array(data, dtype=float)
  if((res.ndim != 2) or (res.shape[0] != res.shape[1])):
    raise ValueError(f"ERROR: {name} must be a square matrix (found shape {res.shape})")
  return readonly(res)
