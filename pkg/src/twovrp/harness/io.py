"""Plain-text instance files.

::

    NAME: I21
    TYPE: 2TSP                  # or 2VRP
    DIMENSION: 49               # number of nodes
    CAPACITY: 20 20             # 2VRP only
    DEPOTS: 0 0 0 0             # v1 start, v1 end, v2 start, v2 end
    BALANCED: 1                 # 2TSP only, default 1
    NODE_COORD_SECTION          # id x y; nearest-integer Euclidean costs
    ...
    EDGE_COST_SECTION_V1        # or explicit rows; INF allowed
    EDGE_COST_SECTION_V2        # optional, defaults to V1
    CUSTOMER_SECTION            # 2VRP: id L R l1L l1R l2L l2R demand fixed(0|1|2)
    BOTH_PERIODS_SECTION        # 2TSP: node ids visited in both periods
    EOF

For a 2TSP file every node except the depot is a customer.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from ..model import INF_INT, CostModel, Fleet, Instance, ModelError, SegmentCustomer
from ..two_period import TwoPeriodInstance, euclidean_distances

SECTIONS = (
    "NODE_COORD_SECTION",
    "EDGE_COST_SECTION_V1",
    "EDGE_COST_SECTION_V2",
    "CUSTOMER_SECTION",
    "BOTH_PERIODS_SECTION",
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _cost_token(tok: str, lineno: int):
    if tok.upper() in ("INF", "INFINITY"):
        return INF_INT
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(f"bad cost {tok!r}", lineno) from None
    if v < 0:
        raise ParseError(f"negative cost {v}", lineno)
    return min(v, INF_INT)


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected integer, got {tok!r}", lineno) from None


def _read(text: str):
    header: dict[str, tuple[str, int]] = {}
    sections: dict[str, list[tuple[int, list[str]]]] = {}
    current = None
    saw_eof = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "EOF":
            saw_eof = True
            break
        if line in SECTIONS:
            if line in sections:
                raise ParseError(f"duplicate section {line}", lineno)
            current = line
            sections[current] = []
            continue
        if line.endswith("_SECTION"):
            raise ParseError(f"unknown section {line}", lineno)
        if current is None:
            if ":" not in line:
                raise ParseError(f"expected 'KEY: value', got {line!r}", lineno)
            key, value = line.split(":", 1)
            header[key.strip().upper()] = (value.strip(), lineno)
        else:
            sections[current].append((lineno, line.split()))
    if not saw_eof:
        raise ParseError("missing EOF (truncated file?)")
    return header, sections


def _need(header, key):
    if key not in header:
        raise ParseError(f"missing header {key}")
    return header[key]


def _matrix(rows, dim, name):
    if len(rows) != dim:
        last = rows[-1][0] if rows else None
        raise ParseError(f"{name}: expected {dim} rows, found {len(rows)}", last)
    out = np.empty((dim, dim), dtype=np.int64)
    for r, (lineno, toks) in enumerate(rows):
        if len(toks) != dim:
            raise ParseError(f"{name}: expected {dim} entries, found {len(toks)}", lineno)
        out[r] = [_cost_token(t, lineno) for t in toks]
    return out


def _coords(rows, dim):
    if len(rows) != dim:
        last = rows[-1][0] if rows else None
        raise ParseError(f"NODE_COORD_SECTION: expected {dim} nodes, found {len(rows)}", last)
    xy = [None] * dim
    for lineno, toks in rows:
        if len(toks) != 3:
            raise ParseError("NODE_COORD_SECTION rows are 'id x y'", lineno)
        i = _int(toks[0], lineno)
        if not 0 <= i < dim or xy[i] is not None:
            raise ParseError(f"bad or repeated node id {i}", lineno)
        xy[i] = (_int(toks[1], lineno), _int(toks[2], lineno))
    return tuple(xy)


def _costs(sections, dim):
    coords = None
    if "NODE_COORD_SECTION" in sections:
        coords = _coords(sections["NODE_COORD_SECTION"], dim)
        c1 = euclidean_distances(coords)
        c2 = c1
    elif "EDGE_COST_SECTION_V1" in sections:
        c1 = _matrix(sections["EDGE_COST_SECTION_V1"], dim, "EDGE_COST_SECTION_V1")
        c2 = c1
        if "EDGE_COST_SECTION_V2" in sections:
            c2 = _matrix(sections["EDGE_COST_SECTION_V2"], dim, "EDGE_COST_SECTION_V2")
    else:
        raise ParseError("missing NODE_COORD_SECTION or EDGE_COST_SECTION_V1")
    try:
        return CostModel(c1, c2), coords
    except ModelError as exc:
        raise ParseError(str(exc)) from exc


def parses(text: str) -> Instance | TwoPeriodInstance:
    header, sections = _read(text)
    kind, lineno = _need(header, "TYPE")
    kind = kind.upper()
    name = header.get("NAME", ("", 0))[0]
    dim_s, dim_line = _need(header, "DIMENSION")
    dim = _int(dim_s, dim_line)
    costs, coords = _costs(sections, dim)
    depots_s, dline = _need(header, "DEPOTS")
    depots = [_int(t, dline) for t in depots_s.split()]
    if kind == "2TSP":
        if len(set(depots)) != 1:
            raise ParseError("2TSP files have a single depot", dline)
        if "BOTH_PERIODS_SECTION" not in sections:
            raise ParseError("missing BOTH_PERIODS_SECTION")
        both = [_int(t, ln) for ln, toks in sections["BOTH_PERIODS_SECTION"] for t in toks]
        balanced = header.get("BALANCED", ("1", 0))[0] not in ("0", "no", "false")
        depot = depots[0]
        try:
            return TwoPeriodInstance(
                depot, frozenset(both), frozenset(set(range(dim)) - set(both) - {depot}),
                costs, balanced, name=name, coords=coords,
            )
        except ModelError as exc:
            raise ParseError(str(exc)) from exc
    if kind != "2VRP":
        raise ParseError(f"unknown TYPE {kind!r}", lineno)
    if len(depots) != 4:
        raise ParseError("DEPOTS needs four node ids", dline)
    cap_s, cline = _need(header, "CAPACITY")
    cap = [_int(t, cline) for t in cap_s.split()]
    if len(cap) != 2:
        raise ParseError("CAPACITY needs two values", cline)
    if "CUSTOMER_SECTION" not in sections:
        raise ParseError("missing CUSTOMER_SECTION")
    customers = []
    for ln, toks in sections["CUSTOMER_SECTION"]:
        if len(toks) != 9:
            raise ParseError("CUSTOMER_SECTION rows are 'id L R l1L l1R l2L l2R demand fixed'", ln)
        cid, left, right = (_int(t, ln) for t in toks[:3])
        trav = [_cost_token(t, ln) for t in toks[3:7]]
        trav = [math.inf if v >= INF_INT else v for v in trav]
        demand, fixed = _int(toks[7], ln), _int(toks[8], ln)
        if fixed not in (0, 1, 2):
            raise ParseError(f"fixed must be 0, 1 or 2, got {fixed}", ln)
        try:
            customers.append(SegmentCustomer(
                cid, left, right, ((trav[0], trav[1]), (trav[2], trav[3])), demand, fixed or None,
            ))
        except ModelError as exc:
            raise ParseError(str(exc), ln) from exc
    try:
        return Instance(Fleet((cap[0], cap[1]), *depots), costs, tuple(customers), name=name)
    except ModelError as exc:
        raise ParseError(str(exc)) from exc


def parse_instance(path) -> Instance | TwoPeriodInstance:
    return parses(Path(path).read_text())


def _fmt_cost(v) -> str:
    return "INF" if v >= INF_INT or v == math.inf else str(int(v))


def _matrix_lines(a: np.ndarray) -> list[str]:
    return [" ".join(_fmt_cost(v) for v in row) for row in a.tolist()]


def formats(inst: Instance | TwoPeriodInstance) -> str:
    lines = [f"NAME: {inst.name}"]
    if isinstance(inst, TwoPeriodInstance):
        dim = inst.distances.dimension
        lines += ["TYPE: 2TSP", f"DIMENSION: {dim}", f"DEPOTS: {inst.depot} {inst.depot} {inst.depot} {inst.depot}",
                  f"BALANCED: {int(inst.balanced)}"]
        if inst.coords is not None and np.array_equal(euclidean_distances(inst.coords), inst.distances.array[0]) \
                and np.array_equal(inst.distances.array[0], inst.distances.array[1]):
            lines.append("NODE_COORD_SECTION")
            lines += [f"{i} {x} {y}" for i, (x, y) in enumerate(inst.coords)]
        else:
            lines.append("EDGE_COST_SECTION_V1")
            lines += _matrix_lines(inst.distances.array[0])
            if not np.array_equal(inst.distances.array[0], inst.distances.array[1]):
                lines.append("EDGE_COST_SECTION_V2")
                lines += _matrix_lines(inst.distances.array[1])
        lines.append("BOTH_PERIODS_SECTION")
        both = sorted(inst.both_periods)
        for k in range(0, len(both), 16):
            lines.append(" ".join(str(v) for v in both[k:k + 16]))
    else:
        f = inst.fleet
        lines += ["TYPE: 2VRP", f"DIMENSION: {inst.costs.dimension}",
                  f"CAPACITY: {f.capacity[0]} {f.capacity[1]}",
                  f"DEPOTS: {f.v1_start} {f.v1_end} {f.v2_start} {f.v2_end}",
                  "EDGE_COST_SECTION_V1"]
        lines += _matrix_lines(inst.costs.array[0])
        lines.append("EDGE_COST_SECTION_V2")
        lines += _matrix_lines(inst.costs.array[1])
        lines.append("CUSTOMER_SECTION")
        for c in inst.customers:
            trav = " ".join(_fmt_cost(v) for row in c.traverse for v in row)
            lines.append(f"{c.id} {c.left} {c.right} {trav} {c.demand} {c.fixed_to or 0}")
    lines.append("EOF")
    return "\n".join(lines) + "\n"


def write_instance(inst: Instance | TwoPeriodInstance, path) -> None:
    Path(path).write_text(formats(inst))
