"""
0-1 integer programming service layer.

This module provides an exact depth-first branch-and-bound solver for
binary programs with two-sided linear constraints:
- BranchAndBoundSolver: single-use solver object
- solve / check: pure entry points
- to_lp_format: LP text dump for cross-checking against external solvers

Branching takes the lowest-index unfixed variable and tries 1 before 0 when
its objective coefficient is positive, 0 before 1 otherwise. A subtree is
pruned when its optimistic bound (current objective plus every positive
coefficient still free) cannot beat the incumbent, or when interval
propagation proves some constraint unsatisfiable. The first optimum met in
branching order is kept, so solves are deterministic.
"""

import logging
from collections import deque
from collections.abc import Iterable

from app.core.enums import SolveStatus
from app.core.exceptions import MalformedProblemException
from app.ilp.schemas import IlpProblem, IlpSolution

logger = logging.getLogger(__name__)

UNSET = -1


class BranchAndBoundSolver:
    """
    Depth-first branch and bound over binary variables.

    Args:
        problem: Well-formed 0-1 program (maximize)
        use_pruning: Disable to search every leaf and check feasibility there only
    """

    def __init__(self, problem: IlpProblem, use_pruning: bool = True):
        self.problem = problem
        self.use_pruning = use_pruning
        n = problem.num_variables
        self._values = [UNSET] * n
        self._objective = list(problem.objective)
        self._watch: list[list[int]] = [[] for _ in range(n)]
        for index, constraint in enumerate(problem.constraints):
            for variable in {variable for variable, _ in constraint.terms}:
                self._watch[variable].append(index)
        self._current = 0
        self._optimistic = sum(c for c in self._objective if c > 0)
        self._best_value: int | None = None
        self._best: tuple[int, ...] | None = None
        self.nodes = 0

    # ==================== Assignment Trail ====================

    def _assign(self, variable: int, value: int, trail: list[int]) -> None:
        self._values[variable] = value
        coefficient = self._objective[variable]
        self._current += coefficient * value
        if coefficient > 0:
            self._optimistic -= coefficient
        trail.append(variable)

    def _undo(self, trail: list[int]) -> None:
        for variable in reversed(trail):
            coefficient = self._objective[variable]
            self._current -= coefficient * self._values[variable]
            if coefficient > 0:
                self._optimistic += coefficient
            self._values[variable] = UNSET
        trail.clear()

    # ==================== Propagation ====================

    def _propagate(self, constraint_indices: Iterable[int], trail: list[int]) -> bool:
        """Interval propagation to a fixpoint; False when a constraint cannot hold."""
        constraints = self.problem.constraints
        queue = deque(dict.fromkeys(constraint_indices))
        queued = set(queue)

        while queue:
            index = queue.popleft()
            queued.discard(index)
            constraint = constraints[index]
            lower, upper = constraint.lower, constraint.upper

            low = high = 0
            free: list[tuple[int, int]] = []
            for variable, coefficient in constraint.terms:
                value = self._values[variable]
                if value == UNSET:
                    free.append((variable, coefficient))
                    if coefficient < 0:
                        low += coefficient
                    else:
                        high += coefficient
                else:
                    low += coefficient * value
                    high += coefficient * value

            if (upper is not None and low > upper) or (lower is not None and high < lower):
                return False

            for variable, coefficient in free:
                if self._values[variable] != UNSET:
                    continue
                allowed = []
                for value in (0, 1):
                    shifted_low = low - min(coefficient, 0) + coefficient * value
                    shifted_high = high - max(coefficient, 0) + coefficient * value
                    if (upper is not None and shifted_low > upper) or (
                        lower is not None and shifted_high < lower
                    ):
                        continue
                    allowed.append(value)
                if not allowed:
                    return False
                if len(allowed) == 1:
                    self._assign(variable, allowed[0], trail)
                    for watched in self._watch[variable]:
                        if watched not in queued:
                            queue.append(watched)
                            queued.add(watched)
                    # bounds of this constraint changed; it was re-queued above
                    break
        return True

    # ==================== Search ====================

    def _feasible_leaf(self) -> bool:
        return all(c.holds(self._values) for c in self.problem.constraints)

    def _branch(self, start: int) -> None:
        self.nodes += 1
        variable = next(
            (i for i in range(start, len(self._values)) if self._values[i] == UNSET), None
        )

        if variable is None:
            if not self._feasible_leaf():
                return
            if self._best_value is None or self._current > self._best_value:
                self._best_value = self._current
                self._best = tuple(self._values)
            return

        if self.use_pruning and self._best_value is not None:
            if self._current + self._optimistic <= self._best_value:
                return

        order = (1, 0) if self._objective[variable] > 0 else (0, 1)
        for value in order:
            trail: list[int] = []
            self._assign(variable, value, trail)
            if not self.use_pruning or self._propagate(self._watch[variable], trail):
                self._branch(variable + 1)
            self._undo(trail)

    def solve(self) -> IlpSolution:
        """Search to optimality; single use."""
        trail: list[int] = []
        if not self.use_pruning or self._propagate(range(len(self.problem.constraints)), trail):
            self._branch(0)
        self._undo(trail)

        logger.debug(
            f'Branch and bound over {self.problem.num_variables} variables '
            f'visited {self.nodes} nodes'
        )
        if self._best is None:
            return IlpSolution(status=SolveStatus.INFEASIBLE, nodes=self.nodes)
        return IlpSolution(
            status=SolveStatus.OPTIMAL,
            assignment=self._best,
            objective_value=self._best_value,
            nodes=self.nodes,
        )


def solve(problem: IlpProblem, use_pruning: bool = True) -> IlpSolution:
    """Solve a 0-1 program to proven optimality."""
    return BranchAndBoundSolver(problem, use_pruning=use_pruning).solve()


def check(problem: IlpProblem, assignment: Iterable[int]) -> bool:
    """
    True iff the assignment satisfies every constraint.

    Raises:
        MalformedProblemException: If the assignment length does not match
    """
    values = tuple(assignment)
    if len(values) != problem.num_variables:
        raise MalformedProblemException(
            f'assignment has {len(values)} values for {problem.num_variables} variables'
        )
    return all(constraint.holds(values) for constraint in problem.constraints)


# ==================== LP Text Format ====================


def _lp_expression(terms: Iterable[tuple[int, int]]) -> str:
    parts = []
    for variable, coefficient in terms:
        sign = '-' if coefficient < 0 else '+'
        magnitude = abs(coefficient)
        factor = '' if magnitude == 1 else f'{magnitude} '
        parts.append(f'{sign} {factor}x{variable}')
    if not parts:
        return '0 x0'
    text = ' '.join(parts)
    return text[2:] if text.startswith('+ ') else text


def to_lp_format(problem: IlpProblem, name: str = 'next_point') -> str:
    """
    Render the problem in LP text format.

    Variables are emitted as x0, x1, ...; a comment block maps them back to
    their readable names. Two-sided rows are split into `_lo` and `_hi` rows.
    """
    lines = [f'\\ {name}']
    for index, variable in enumerate(problem.variables):
        lines.append(f'\\ x{index} = {variable}')

    objective_terms = [(i, c) for i, c in enumerate(problem.objective) if c]
    lines += ['Maximize', f' obj: {_lp_expression(objective_terms)}', 'Subject To']

    for index, constraint in enumerate(problem.constraints):
        expression = _lp_expression(constraint.terms)
        lower, upper = constraint.lower, constraint.upper
        row = f'c{index}'
        if lower is not None and lower == upper:
            lines.append(f' {row}: {expression} = {lower}')
            continue
        if lower is not None:
            lines.append(f' {row}_lo: {expression} >= {lower}')
        if upper is not None:
            lines.append(f' {row}_hi: {expression} <= {upper}')

    lines.append('Binary')
    lines += [f' x{index}' for index in range(problem.num_variables)]
    lines.append('End')
    return '\n'.join(lines) + '\n'
