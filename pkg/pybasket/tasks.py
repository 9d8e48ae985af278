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
This file contains the task graph used to schedule independent computations:
 the PCA terms of a price, the combination step, the reference of a sweep and its rows.
Tasks are nodes of a networkx graph, whose edges state which tasks must be executed before which.
Tasks of the same topological generation do not depend on each other, and can be submitted together
 to an executor (e.g., a `concurrent.futures.ProcessPoolExecutor`).
"""

import itertools
import logging
from collections import namedtuple

import networkx as nx

logger = logging.getLogger(__name__)


task_info_cls = namedtuple("task_info_cls", ("name", "fn", "args"))
task_info_cls.__doc__ = "A task: `fn(*args)` computes the result stored under `name`"

task_ref_cls = namedtuple("task_ref_cls", ("name",))
task_ref_cls.__doc__ = "A placeholder in the arguments of a task, replaced by the result of the task `name`"


def _resolve_(args, results):
  return tuple(results[a.name] if(isinstance(a, task_ref_cls)) else a for a in args)


class TaskGraph(object):
  """Implements a task ordering using a networkx graph"""
  __slots__ = ("m_content",)

  def __init__(self):
    self.m_content = nx.DiGraph()

  def add(self, info, *args, **kwargs):
    """Adds a task to the graph
Parameters:
  info: a `task_info_cls` giving the task to add
  args: additional non keyworded arguments: tasks that must be executed before this one
  kwargs: the keyword `"after"` indicates which tasks must be executed before this one
Every `task_ref_cls` in `info.args` also adds an ordering constraint.
    """
    name = info.name
    # 1. check that the task does not already exist
    tmp = self.m_content.nodes.get(name)
    if((tmp is not None) and (tmp.get("spec") is not None)):
      raise ValueError(f"ERROR: task \"{name}\" already declared")
    # 2. add the task
    self.m_content.add_node(name, spec=info)
    # 3. add the ordering relation
    refs = (a.name for a in info.args if(isinstance(a, task_ref_cls)))
    for prev in itertools.chain(self._manage_element__(args), self._manage_element__(kwargs.get("after", ())), refs):
      self.m_content.add_edge(prev, name)

  def add_order(self, *args):
    """Adds new ordering constraints between the tasks
Example:
  add_order(("t1", "t2"), "t3", ("t4", "t5")) states that "t1" and "t2" are executed before "t3",
  which is executed before "t4" and "t5"
    """
    if(len(args) > 1):
      previous = tuple(self._manage_element__(args[0]))
      for tmp in args[1:]:
        current = tuple(self._manage_element__(tmp))
        for t1 in previous:
          for t2 in current:
            self.m_content.add_edge(t1, t2)
        previous = current

  @staticmethod
  def _manage_element__(el):
    if(isinstance(el, task_info_cls)):
      yield el.name
    elif(isinstance(el, (tuple, list, set))):
      for sub in el:
        yield from TaskGraph._manage_element__(sub)
    elif(isinstance(el, str)):
      yield el

  def _spec_(self, name):
    spec = self.m_content.nodes[name].get("spec")
    if(spec is None):
      raise ValueError(f"ERROR: task \"{name}\" not declared")
    return spec

  def __len__(self):
    return self.m_content.number_of_nodes()

  def __iter__(self):
    """Yields all the registered tasks in an order compatible with the user specification"""
    for name in nx.topological_sort(self.m_content):
      yield self._spec_(name)

  def generations(self):
    """generations() -> list[list[task_info_cls]]
Returns the topological generations of the graph: the tasks of a generation only depend on tasks of previous ones.
Within a generation, tasks are sorted by their insertion order.
    """
    order = {name: i for i, name in enumerate(self.m_content.nodes)}
    return [
      [self._spec_(name) for name in sorted(gen, key=order.get)]
      for gen in nx.topological_generations(self.m_content)
    ]

  def run(self, executor=None):
    """run() -> dict
run(concurrent.futures.Executor) -> dict
Executes all the tasks, generation by generation, and returns the dictionary mapping task names to their results.
Without executor, tasks are executed sequentially in the calling process.
    """
    results = {}
    for i, gen in enumerate(self.generations()):
      logger.debug(f"generation {i}: {[info.name for info in gen]}")
      if((executor is None) or (len(gen) == 1)):
        for info in gen:
          results[info.name] = info.fn(*_resolve_(info.args, results))
      else:
        futures = [(info.name, executor.submit(info.fn, *_resolve_(info.args, results))) for info in gen]
        for name, future in futures:
          results[name] = future.result()
    return results
