"""Grid evaluation: dependency-ordered formulas with spill semantics.

A formula returning a multi-cell table spills into the rectangle anchored
at its own cell, extending down and right. Reading a cell inside another
formula's spill depends on that formula (the producing anchor). Because a
spill's extent is only known after its formula runs, evaluation iterates to
a fixed point: each pass evaluates in topological order over the edges
known so far, then folds newly discovered spill-reads into the graph.

Failures never abort a grid; they land in the failing cell as one of the
in-band tokens #NAME (unknown function), #CYCLE (dependency cycle), #SPILL
(spill collision) or #VALUE (bad argument, upstream error, unparsable
formula). Only exceeding max_cells raises.

Evaluation is deterministic: cells of equal depth are applied in row-major
order, and running with workers > 1 is byte-identical to sequential.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from wikigrid.core import ToolkitError, bad_input
from wikigrid.formula import CellRef, Call, Expr, NumberLit, StringLit, parse_cell_name, parse_formula, referenced_cells
from wikigrid.functions import ValueTable

ERROR_TOKENS = ("#NAME", "#CYCLE", "#SPILL", "#VALUE")

Builtins = Mapping[str, Callable[[Sequence[str]], ValueTable]]

DEFAULT_MAX_CELLS = 100_000


@dataclass
class Grid:
    """Sparse cell sources: literals, or formulas when the text starts with '='."""

    cells: dict[CellRef, str] = field(default_factory=dict)


def grid_from_cells(cells: Mapping[str, str]) -> Grid:
    return Grid({parse_cell_name(name): content for name, content in cells.items()})


def parse_grid_tsv(text: str) -> Grid:
    """One row per line, one cell per tab-separated field; empty fields are holes."""
    cells: dict[CellRef, str] = {}
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for row_index, line in enumerate(lines, start=1):
        for col_index, content in enumerate(line.split("\t"), start=1):
            if content:
                cells[CellRef(col_index, row_index)] = content
    return Grid(cells)


@dataclass
class EvaluatedGrid:
    """Materialized values for every occupied cell, plus spill extents."""

    values: dict[CellRef, str]
    spills: dict[CellRef, tuple[int, int]]


class _Pass:
    """One topological evaluation sweep with the spill edges known so far."""

    def __init__(
        self,
        literals: dict[CellRef, str],
        formulas: dict[CellRef, Expr | None],
        static_deps: dict[CellRef, set[CellRef]],
        spill_edges: dict[CellRef, set[CellRef]],
        builtins: Builtins,
        max_cells: int,
        workers: int,
    ):
        self.literals = literals
        self.formulas = formulas
        self.builtins = builtins
        self.max_cells = max_cells
        self.workers = workers
        self.edges = {
            cell: (static_deps[cell] | spill_edges.get(cell, set())) & formulas.keys()
            for cell in formulas
        }
        self.values: dict[CellRef, str] = dict(literals)
        self.spill_owner: dict[CellRef, CellRef] = {}
        self.spills: dict[CellRef, tuple[int, int]] = {}
        self.reads: dict[CellRef, set[CellRef]] = {cell: set() for cell in formulas}
        self.cycle_cells = _cycle_members(self.edges)
        occupied = literals.keys() | formulas.keys()
        self._max_col = max((c.col for c in occupied), default=0)
        self._max_row = max((c.row for c in occupied), default=0)

    def run(self) -> None:
        self._check_bounds(self._max_col, self._max_row)
        for cell in self.cycle_cells:
            self.values[cell] = "#CYCLE"
        for cell, expr in self.formulas.items():
            if expr is None and cell not in self.cycle_cells:
                self.values[cell] = "#VALUE"
        levels = _levels(self.edges, self.cycle_cells)
        executor = ThreadPoolExecutor(max_workers=self.workers) if self.workers > 1 else None
        try:
            for level in levels:
                pending = [
                    cell
                    for cell in sorted(level, key=lambda c: (c.row, c.col))
                    if self.formulas[cell] is not None
                ]
                if executor is None:
                    results = [self._evaluate_cell(cell) for cell in pending]
                else:
                    results = list(executor.map(self._evaluate_cell, pending))
                # Apply in row-major order so spill collisions resolve the
                # same way no matter how evaluation was scheduled.
                for cell, result in zip(pending, results):
                    self._apply(cell, result)
        finally:
            if executor is not None:
                executor.shutdown()

    # -- evaluation ---------------------------------------------------------

    def _evaluate_cell(self, cell: CellRef) -> str | ValueTable:
        return self._evaluate(cell, self.formulas[cell])

    def _evaluate(self, origin: CellRef, expr: Expr) -> str | ValueTable:
        if isinstance(expr, StringLit):
            return expr.text
        if isinstance(expr, NumberLit):
            return format(expr.value, "f")
        if isinstance(expr, CellRef):
            self.reads[origin].add(expr)
            return self.values.get(expr, "")
        if isinstance(expr, Call):
            return self._call(origin, expr)
        raise TypeError(f"not an expression: {expr!r}")

    def _call(self, origin: CellRef, call: Call) -> str | ValueTable:
        builtin = self.builtins.get(call.name)
        args: list[str] = []
        failure: str | None = None
        for arg_expr in call.args:
            value = self._evaluate(origin, arg_expr)
            if isinstance(value, ValueTable):
                # A nested call used as an argument must be scalar-shaped.
                if value.shape == (0, value.n_cols):
                    value = ""
                elif value.shape == (1, 1):
                    value = value.rows[0][0]
                else:
                    failure = failure or "#VALUE"
                    value = ""
            if value in ERROR_TOKENS:
                failure = failure or value
            args.append(value)
        if builtin is None:
            return "#NAME"
        if failure is not None:
            return failure
        try:
            return builtin(args)
        except ToolkitError:
            return "#VALUE"

    # -- spill application --------------------------------------------------

    def _apply(self, cell: CellRef, result: str | ValueTable) -> None:
        if isinstance(result, str):
            self.values[cell] = result
            return
        n_rows, n_cols = result.shape
        if n_rows == 0:
            self.values[cell] = ""
            return
        if (n_rows, n_cols) == (1, 1):
            self.values[cell] = result.rows[0][0]
            return
        targets = [
            CellRef(cell.col + dc, cell.row + dr)
            for dr in range(n_rows)
            for dc in range(n_cols)
        ]
        for target in targets[1:]:
            if target in self.literals or target in self.formulas or target in self.spill_owner:
                self.values[cell] = "#SPILL"
                return
        self._check_bounds(cell.col + n_cols - 1, cell.row + n_rows - 1)
        self.spills[cell] = (n_rows, n_cols)
        for target, value in zip(targets, (v for row in result.rows for v in row)):
            self.values[target] = value
            self.spill_owner[target] = cell

    def _check_bounds(self, col: int, row: int) -> None:
        self._max_col = max(self._max_col, col)
        self._max_row = max(self._max_row, row)
        if self._max_col * self._max_row > self.max_cells:
            raise bad_input(
                f"evaluated grid would cover {self._max_col * self._max_row} cells"
                f" (limit {self.max_cells})"
            )


def _cycle_members(edges: Mapping[CellRef, set[CellRef]]) -> set[CellRef]:
    """Cells on a dependency cycle: members of non-trivial SCCs plus self-loops."""
    index: dict[CellRef, int] = {}
    low: dict[CellRef, int] = {}
    on_stack: set[CellRef] = set()
    stack: list[CellRef] = []
    counter = 0
    cycles: set[CellRef] = set()

    for root in sorted(edges, key=lambda c: (c.row, c.col)):
        if root in index:
            continue
        # Iterative Tarjan: (node, iterator over deps) frames.
        work = [(root, iter(sorted(edges[root], key=lambda c: (c.row, c.col))))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, deps = work[-1]
            advanced = False
            for dep in deps:
                if dep not in index:
                    index[dep] = low[dep] = counter
                    counter += 1
                    stack.append(dep)
                    on_stack.add(dep)
                    work.append((dep, iter(sorted(edges[dep], key=lambda c: (c.row, c.col)))))
                    advanced = True
                    break
                if dep in on_stack:
                    low[node] = min(low[node], index[dep])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                component: list[CellRef] = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node:
                        break
                if len(component) > 1 or node in edges[node]:
                    cycles.update(component)
    return cycles


def _levels(edges: Mapping[CellRef, set[CellRef]], cycle_cells: set[CellRef]) -> list[list[CellRef]]:
    """Group acyclic formula cells by dependency depth (Kahn layering)."""
    remaining = {
        cell: {dep for dep in deps if dep not in cycle_cells}
        for cell, deps in edges.items()
        if cell not in cycle_cells
    }
    depth: dict[CellRef, int] = {}
    ready = [cell for cell, deps in remaining.items() if not deps]
    dependents: dict[CellRef, list[CellRef]] = {}
    for cell, deps in remaining.items():
        for dep in deps:
            dependents.setdefault(dep, []).append(cell)
    pending = {cell: len(deps) for cell, deps in remaining.items()}
    queue = list(ready)
    for cell in queue:
        depth[cell] = 0
    while queue:
        cell = queue.pop()
        for dependent in dependents.get(cell, []):
            pending[dependent] -= 1
            depth[dependent] = max(depth.get(dependent, 0), depth[cell] + 1)
            if pending[dependent] == 0:
                queue.append(dependent)
    if len(depth) != len(remaining):  # pragma: no cover - SCC pass prevents this
        raise bad_input("dependency graph did not resolve to an order")
    levels: dict[int, list[CellRef]] = {}
    for cell, level in depth.items():
        levels.setdefault(level, []).append(cell)
    return [levels[level] for level in sorted(levels)]


def evaluate_grid(
    grid: Grid,
    builtins: Builtins,
    max_cells: int = DEFAULT_MAX_CELLS,
    workers: int = 1,
) -> EvaluatedGrid:
    """Evaluate every formula; returns materialized values plus spill extents."""
    literals: dict[CellRef, str] = {}
    formulas: dict[CellRef, Expr | None] = {}
    for cell, content in grid.cells.items():
        if content.startswith("="):
            try:
                formulas[cell] = parse_formula(content)
            except ToolkitError:
                formulas[cell] = None
        else:
            literals[cell] = content
    static_deps = {
        cell: (referenced_cells(expr) if expr is not None else set())
        for cell, expr in formulas.items()
    }

    # Each sweep is a pure function of the edge set, so the result is final
    # as soon as a sweep discovers no spill-read edge it did not already
    # know. Edges only accumulate (a formula that once read another's spill
    # keeps the dependency), which guarantees termination: the edge set is
    # bounded by formulas × formulas.
    spill_edges: dict[CellRef, set[CellRef]] = {}
    max_rounds = len(formulas) * len(formulas) + 2
    for _round in range(max_rounds):
        sweep = _Pass(literals, formulas, static_deps, spill_edges, builtins, max_cells, workers)
        sweep.run()
        grew = False
        for cell, read in sweep.reads.items():
            for ref in read:
                if ref in literals or ref in formulas:
                    continue
                owner = sweep.spill_owner.get(ref)
                if owner is not None and owner not in spill_edges.get(cell, set()):
                    spill_edges.setdefault(cell, set()).add(owner)
                    grew = True
        if not grew:
            return EvaluatedGrid(sweep.values, sweep.spills)
    raise bad_input("grid evaluation did not stabilize; spill reads keep shifting")


# -- printing ----------------------------------------------------------------

def table_rows(evaluated: EvaluatedGrid) -> list[list[str]]:
    """Dense row-major dump from A1 to the furthest occupied cell."""
    if not evaluated.values:
        return []
    max_col = max(cell.col for cell in evaluated.values)
    max_row = max(cell.row for cell in evaluated.values)
    return [
        [evaluated.values.get(CellRef(col, row), "") for col in range(1, max_col + 1)]
        for row in range(1, max_row + 1)
    ]


def render_rows(rows: list[list[str]], fmt: str) -> str:
    """Render a rectangular table as tsv, csv (RFC-4180 quoting) or json."""
    if fmt == "tsv":
        return "".join("\t".join(row) + "\n" for row in rows)
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerows(rows)
        return buffer.getvalue()
    if fmt == "json":
        return json.dumps(rows, ensure_ascii=False) + "\n"
    raise bad_input(f"unknown output format {fmt!r}")


def print_grid(evaluated: EvaluatedGrid, fmt: str = "tsv") -> str:
    rows = table_rows(evaluated)
    if not rows:
        return ""
    return render_rows(rows, fmt)
