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
This file contains the classes used for error reporting during the validation of
market data, contracts and run configurations.
Validation never stops at the first problem: all of them are collected in a `check_errors__c`
 object, which is then turned into a single ValueError by `raise_if`.
"""


################################################################################
# error reporting
################################################################################

class _invalid__c(object):
  """This class states that a value does not satisfy its specification"""
  __slots__ = ("m_value", "m_spec",)
  def __init__(self, value, spec):
    self.m_value = value
    self.m_spec = spec
  def __str__(self):
    return f"value {self.m_value!r} is not valid (expected: {self.m_spec})"

class _missing__c(object):
  """This class states that a mandatory entry has no value"""
  __slots__ = ()
  def __str__(self):
    return "mandatory entry has no value"

class _message__c(object):
  __slots__ = ("m_msg",)
  def __init__(self, msg):
    self.m_msg = msg
  def __str__(self):
    return self.m_msg


## main class

class check_errors__c(object):
  """This is a global class managing all the validation errors found while checking an object."""
  __slots__ = ("m_content",)
  def __init__(self):
    """check_errors__c() -> check_errors__c"""
    self.m_content = {}

  def add(self, location, message):
    """add(str, str) -> check_errors__c
Adds a free-form error message at `location`
    """
    self._ensure_(location).append(_message__c(message))
    return self
  def add_invalid(self, location, value, spec):
    """add_invalid(str, object, object) -> check_errors__c
Adds the error that the value at `location` does not satisfy the specification `spec`
    """
    self._ensure_(location).append(_invalid__c(value, spec))
    return self
  def add_missing(self, location):
    """add_missing(str) -> check_errors__c
Adds the error that the mandatory entry `location` has no value
    """
    self._ensure_(location).append(_missing__c())
    return self
  def extend(self, other, prefix=None):
    """extend(check_errors__c, str) -> check_errors__c
Copies all the errors of `other` in `self`, optionally prefixing their location
    """
    for loc, errs in other.m_content.items():
      loc_new = loc if(prefix is None) else f"{prefix}/{loc}"
      self._ensure_(loc_new).extend(errs)
    return self

  def _ensure_(self, location):
    res = self.m_content.get(location)
    if(res is None):
      res = []
      self.m_content[location] = res
    return res

  def __len__(self):
    return sum(len(el) for el in self.m_content.values())
  def __bool__(self):
    return bool(self.m_content)
  def __iter__(self):
    for loc, el in self.m_content.items():
      for sub in el:
        yield (loc, sub)
  def __str__(self):
    return "\n".join(f"In {loc}:\n" + "\n".join(f"  {err}" for err in el) for loc, el in self.m_content.items())


def raise_if(errors):
  """raise_if(check_errors__c) -> None
Raises a ValueError describing all the errors in parameter, if there is any
  """
  if(bool(errors)):
    raise ValueError(f"ERROR: validation failed\n{errors}")
