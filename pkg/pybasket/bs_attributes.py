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
Value specifications.
A specification is a callable object that returns whether a value is acceptable,
 and whose string representation describes the accepted values (used in error messages).
They declare the schema of the run configurations in `bs_configuration`.
"""

import enum
import inspect

import numpy as np

from pybasket.utils import domain__c


class _attribute_c(object):
  """This is the super class of all value specifications"""
  pass

class Class(_attribute_c):
  """This specification enforce that the value must be of a specific class"""
  __slots__ = ("m_class",)
  def __init__(self, domain):
    self.m_class = domain
  def __call__(self, value):
    return isinstance(value, self.m_class)
  def __str__(self):
    if(isinstance(self.m_class, tuple)):
      return " | ".join(c.__qualname__ for c in self.m_class)
    return self.m_class.__qualname__

def Bool():
  """This specification enforce that the value must be a boolean"""
  return Class(bool)

def String():
  """This specification enforce that the value must be a string"""
  return Class(str)

class Enum(_attribute_c):
  """This specification enforce that the value must be one of a specific set"""
  __slots__ = ("m_domain",)
  def __init__(self, domain):
    if(inspect.isclass(domain) and issubclass(domain, enum.Enum)):
      self.m_domain = tuple(domain)
    elif(isinstance(domain, (list, tuple, set, frozenset))):
      self.m_domain = tuple(domain)
    else:
      raise ValueError(f"ERROR: expected an enum class or a list/tuple/set of data (found {domain})")
  def __call__(self, value):
    return value in self.m_domain
  def __str__(self):
    return "∈ {" + ", ".join(map(str, self.m_domain)) + "}"

class Int(Class):
  """This specification enforce that the value must be an int within a specific domain (None means infinity)"""
  __slots__ = ("m_domain",)
  def __init__(self, *args):
    Class.__init__(self, (int, np.integer))
    self.m_domain = domain__c(*args)
  def __call__(self, value):
    if(Class.__call__(self, value) and not isinstance(value, bool)):
      return self.m_domain.contains(value)
    else:
      return False
  def __str__(self):
    return "int ∈ " + str(self.m_domain)

class Float(Class):
  """This specification enforce that the value must be a real number within a specific domain (None means infinity).
Integers are accepted as real numbers, booleans are not.
  """
  __slots__ = ("m_domain",)
  def __init__(self, *args):
    Class.__init__(self, (float, int, np.floating, np.integer))
    self.m_domain = domain__c(*args)
  def __call__(self, value):
    if(Class.__call__(self, value) and not isinstance(value, bool)):
      return bool(np.isfinite(value)) and self.m_domain.contains(value)
    else:
      return False
  def __str__(self):
    return "float ∈ " + str(self.m_domain)

class List(Class):
  """This specification enforce that the value must be a list whose values satisfy a specification, and whose length is within a specific domain"""
  __slots__ = ("m_size", "m_kind",)
  def __init__(self, size=(), spec=None):
    Class.__init__(self, (list, tuple, np.ndarray))
    self.m_size = domain__c(*size)
    self.m_kind = spec

  def __call__(self, value):
    if(Class.__call__(self, value)):
      if(isinstance(value, np.ndarray) and (value.ndim != 1)):
        return False
      if(self.m_size.contains(len(value))):
        if(self.m_kind is None):
          return True
        else:
          return all(self.m_kind(el) for el in value)
    return False
  def __str__(self):
    return f"list({str(self.m_kind)}) of size ∈ " + str(self.m_size)

class Matrix(Class):
  """This specification enforce that the value must be a square matrix (nested lists or a 2D array) whose entries satisfy a specification"""
  __slots__ = ("m_size", "m_kind",)
  def __init__(self, size=(), spec=None):
    Class.__init__(self, (list, tuple, np.ndarray))
    self.m_size = domain__c(*size)
    self.m_kind = spec

  def __call__(self, value):
    if(not Class.__call__(self, value)):
      return False
    try:
      arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
      return False
    if((arr.ndim != 2) or (arr.shape[0] != arr.shape[1]) or (not self.m_size.contains(arr.shape[0]))):
      return False
    if(self.m_kind is None):
      return True
    return all(self.m_kind(float(el)) for el in arr.flat)
  def __str__(self):
    return f"square matrix({str(self.m_kind)}) of size ∈ " + str(self.m_size)


def check_value(spec, value, location, errors):
  """check_value(_attribute_c, object, str, check_errors__c) -> bool
Checks `value` against `spec`, and stores an error at `location` in `errors` if it does not satisfy it
  """
  if(spec(value)):
    return True
  errors.add_invalid(location, value, spec)
  return False
