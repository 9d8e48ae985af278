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
pybasket
========

pybasket is a Python package for pricing European and Bermudan basket put options
 in the multivariate Black-Scholes model, with a principal component decomposition of the pricing PDE
 into one one-dimensional and d-1 two-dimensional finite difference problems.
"""


__version__ = "1.0"
