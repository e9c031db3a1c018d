"""Line-oriented graph files.

    axis <name>
    edge <name> <axisA> <axisB>          # a loop when A == B
    ray <name> attach <axis> period <loops,loops,...>

``#`` starts a comment.  Axes must be declared before use.  Axis, edge and
ray names share one namespace.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Tuple

from .bigraph import DUAL_SUFFIX, GraphError, UndirectedMultigraph
from .desc import RESERVED, GraphDescription, RayAttachment


class ParseError(GraphError):
    def __init__(self, message: str, line: int):
        super().__init__(f"{message}, line {line}")
        self.line = line


def _check_name(name: str, lineno: int, taken: Dict[str, str]):
    if RESERVED in name or name.endswith(DUAL_SUFFIX):
        raise ParseError(f"reserved character in name {name}", lineno)
    if name in taken:
        raise ParseError(f"duplicate name {name}", lineno)


def parse(text: str) -> GraphDescription:
    axes: List[str] = []
    links: Dict[str, Tuple[str, str]] = {}
    rays: List[RayAttachment] = []
    kinds: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        kw = tokens[0]
        if kw == "axis":
            if len(tokens) != 2:
                raise ParseError("expected: axis <name>", lineno)
            _check_name(tokens[1], lineno, kinds)
            kinds[tokens[1]] = "axis"
            axes.append(tokens[1])
        elif kw == "edge":
            if len(tokens) != 4:
                raise ParseError("expected: edge <name> <axis> <axis>", lineno)
            name, a, b = tokens[1:]
            _check_name(name, lineno, kinds)
            for v in (a, b):
                if kinds.get(v) != "axis":
                    raise ParseError(f"unknown axis {v}", lineno)
            kinds[name] = "edge"
            links[name] = (a, b)
        elif kw == "ray":
            if len(tokens) == 5 and tokens[2] == "attach" and tokens[4] == "period":
                raise ParseError("empty period", lineno)
            if len(tokens) != 6 or tokens[2] != "attach" or tokens[4] != "period":
                raise ParseError("expected: ray <name> attach <axis> period <loops,...>", lineno)
            name, v, counts = tokens[1], tokens[3], tokens[5]
            _check_name(name, lineno, kinds)
            if kinds.get(v) != "axis":
                raise ParseError(f"unknown axis {v}", lineno)
            parts = counts.split(",")
            if any(p == "" for p in parts):
                raise ParseError("empty period", lineno)
            try:
                period = tuple(int(p) for p in parts)
            except ValueError:
                raise ParseError(f"non-numeric loop count in {counts}", lineno) from None
            if any(p < 0 for p in period) or not all(p.isdigit() for p in parts):
                raise ParseError(f"non-numeric loop count in {counts}", lineno)
            kinds[name] = "ray"
            rays.append(RayAttachment(name, v, period))
        else:
            raise ParseError(f"unknown keyword {kw}", lineno)
    if not axes:
        raise ParseError("no axes declared", max(1, len(text.splitlines())))
    return GraphDescription(UndirectedMultigraph.build(axes, links), tuple(rays))


def emit(desc: GraphDescription, comments: Iterable[str] = ()) -> str:
    lines = [f"# {c}" if c else "#" for c in comments]
    lines += [f"axis {v}" for v in desc.base.vertices]
    lines += [f"edge {n} {a} {b}" for n, a, b in desc.base.links]
    lines += [f"ray {r.id} attach {r.attach_vertex} period {','.join(map(str, r.period))}" for r in desc.rays]
    return "\n".join(lines) + "\n"
