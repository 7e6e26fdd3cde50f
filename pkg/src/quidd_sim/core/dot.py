"""DOT export of diagrams.

Internal nodes are circles labeled with their variable, terminals are
boxes labeled with their value. Then-edges are solid, else-edges dashed.
Only the DOT source is produced; rendering is left to the caller.
"""

from __future__ import annotations

from graphviz import Digraph

from ..numerics import format_complex
from .labels import TERMINAL_LEVEL, VariableLabel
from .manager import DiagramHandle


def to_dot(d: DiagramHandle, name: str = "quidd", digits: int = 4) -> str:
    manager = d.manager
    dot = Digraph(name=name)
    dot.attr("node", fontname="helvetica")
    for node in sorted(manager.descendants(d)):
        level, then, else_ = manager.succ(node)
        if level == TERMINAL_LEVEL:
            value = manager.field.to_complex(manager.terminals[then])
            dot.node(str(node), format_complex(value, digits), shape="box")
            continue
        dot.node(str(node), str(VariableLabel.from_level(level)), shape="circle")
        dot.edge(str(node), str(then), style="solid")
        dot.edge(str(node), str(else_), style="dashed")
    return dot.source
