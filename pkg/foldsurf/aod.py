"""
Rearrangement plans for atom arrays moved by two-dimensional acousto-optic
deflectors (AODs).

An AOD batch selects the product grid of some lines and some lanes and
translates the atoms on it rigidly. A horizontally aligned AOD has lines
`x = const` and lanes `y = const`; a diagonally aligned one has lines
`x - y = const` and lanes `x + y = const`. Reflections are planned by
recursive block swaps through a staging band outside the patch, and the
quarter-turn of a patch is a horizontal reflection followed by a diagonal
one.
"""

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .circuit import Layout
from .common import PlanError
from .model import Coord

logger = logging.getLogger(__name__)

# Staging heights tried beyond the minimum clearance
MAX_STAGING_TRIES = 256


class Orientation(enum.Enum):
    Horizontal = "Horizontal"
    Diagonal = "Diagonal"

    def __str__(self) -> str:
        return self.value


def to_frame(coord: Coord, orientation: Orientation) -> Tuple[int, int]:
    """
    Return (line, lane) coordinates of a site in an AOD frame.
    """

    if orientation == Orientation.Horizontal:
        return coord.x2, coord.y2
    return coord.x2 - coord.y2, coord.x2 + coord.y2


def from_frame_delta(delta_line: int, delta_lane: int, orientation: Orientation) -> Tuple[int, int]:
    """
    Convert a frame displacement to a (dx2, dy2) displacement.
    """

    if orientation == Orientation.Horizontal:
        return delta_line, delta_lane
    if (delta_line + delta_lane) % 2:
        raise PlanError(f"diagonal displacement ({delta_line}, {delta_lane}) is off the lattice")
    return (delta_line + delta_lane) // 2, (delta_lane - delta_line) // 2


@dataclass(frozen=True)
class AodGrid:
    """
    Product grid selected by an AOD: `row_lines` are lanes and `col_lines`
    are lines of the AOD's frame.
    """

    orientation: Orientation
    row_lines: Tuple[int, ...]
    col_lines: Tuple[int, ...]

    def __post_init__(self):
        for lines in (self.row_lines, self.col_lines):
            if any(a >= b for a, b in zip(lines, lines[1:])):
                raise PlanError(f"grid lines {lines} are not strictly increasing")

    def selects(self, coord: Coord) -> bool:
        line, lane = to_frame(coord, self.orientation)
        return line in self.col_lines and lane in self.row_lines


@dataclass(frozen=True)
class MoveBatch:
    grid: AodGrid
    translation: Tuple[int, int]

    def __str__(self) -> str:
        rows = ",".join(str(v) for v in self.grid.row_lines)
        cols = ",".join(str(v) for v in self.grid.col_lines)
        dx, dy = self.translation
        return f"BATCH rows:[{rows}] cols:[{cols}] d:({dx},{dy}) aod:{self.grid.orientation}"


@dataclass
class RearrangementPlan:
    batches: List[MoveBatch]
    target: Dict[Coord, Coord]

    def __add__(self, other: "RearrangementPlan") -> "RearrangementPlan":
        # `other` acts on the sites reached by `self`
        target = {start: other.target.get(end, end) for start, end in self.target.items()}
        return RearrangementPlan(self.batches + other.batches, target)

    def to_lines(self) -> List[str]:
        return [str(batch) for batch in self.batches]


@dataclass(frozen=True)
class Violation:
    batch: int
    kind: str
    site: Coord
    moving_line: int
    stationary_line: int

    def __str__(self) -> str:
        return (
            f"batch {self.batch}: {self.kind} at {self.site} "
            f"(moving line {self.moving_line}, stationary line {self.stationary_line})"
        )


@dataclass
class PlanReport:
    permutation: Dict[Coord, Coord]
    violations: List[Violation] = field(default_factory=list)
    matches_target: bool = True

    @property
    def clean(self) -> bool:
        return not self.violations

    @property
    def accepted(self) -> bool:
        return self.clean and self.matches_target


def _path_points(start: Coord, translation: Tuple[int, int]) -> List[Coord]:
    # Lattice points strictly inside a straight move
    dx, dy = translation
    steps = math.gcd(abs(dx), abs(dy))
    if steps <= 1:
        return []
    sx, sy = dx // steps, dy // steps
    return [Coord(start.x2 + j * sx, start.y2 + j * sy) for j in range(1, steps)]


def apply_batch(
    occupancy: Dict[Coord, Coord], batch: MoveBatch, index: int = 0
) -> Tuple[Dict[Coord, Coord], List[Violation]]:
    """
    Replay one batch on an occupancy map (site -> atom), returning the new map
    and the violations it causes.
    """

    moving = {site: atom for site, atom in occupancy.items() if batch.grid.selects(site)}
    stationary = {site: atom for site, atom in occupancy.items() if site not in moving}
    orientation = batch.grid.orientation
    dx, dy = batch.translation

    violations = []
    moved = {}
    for site, atom in sorted(moving.items()):
        line = to_frame(site, orientation)[0]
        for point in _path_points(site, batch.translation):
            if point in stationary:
                violations.append(
                    Violation(index, "crossing", point, line, to_frame(point, orientation)[0])
                )
        end = site.shifted(dx, dy)
        if end in stationary:
            violations.append(
                Violation(index, "collision", end, line, to_frame(end, orientation)[0])
            )
        moved[end] = atom

    result = dict(stationary)
    result.update(moved)

    return result, violations


def verify_plan(plan: RearrangementPlan, sites: Iterable[Coord]) -> PlanReport:
    """
    Replay a plan on atoms placed at `sites` and report the permutation it
    realizes, every crossing or collision, and whether it meets its target.
    """

    occupancy = {site: site for site in sites}
    violations = []
    for idx, batch in enumerate(plan.batches):
        occupancy, found = apply_batch(occupancy, batch, idx)
        violations += found

    permutation = {atom: site for site, atom in occupancy.items()}
    matches = all(permutation.get(start) == end for start, end in plan.target.items()) and set(
        permutation
    ) == set(plan.target)

    return PlanReport(permutation=permutation, violations=violations, matches_target=matches)


def reflection_map(sites: Iterable[Coord], axis: int, orientation: Orientation) -> Dict[Coord, Coord]:
    """
    Target of a reflection: `x -> 2*axis - x` for a horizontal AOD, and
    `(x, y) -> (y + axis, x - axis)` for a diagonal one.
    """

    if orientation == Orientation.Horizontal:
        return {q: Coord(2 * axis - q.x2, q.y2) for q in sites}
    return {q: Coord(q.y2 + axis, q.x2 - axis) for q in sites}


def _line_values(sites: Iterable[Coord], axis: int, orientation: Orientation) -> List[int]:
    lines = sorted({to_frame(q, orientation)[0] for q in sites})
    if not lines:
        return lines

    if sorted(2 * axis - line for line in lines) != lines:
        raise PlanError(f"lines {lines} are not symmetric about the {orientation} axis {axis}")
    gaps = {b - a for a, b in zip(lines, lines[1:])}
    if len(gaps) > 1:
        raise PlanError(f"lines {lines} are not equally spaced")

    return lines


def _lanes(occupancy: Dict[Coord, Coord], lines: Set[int], orientation: Orientation):
    lanes = set()
    for site in occupancy:
        line, lane = to_frame(site, orientation)
        if line in lines:
            lanes.add(lane)
    return tuple(sorted(lanes))


def _batch(
    occupancy, lines: Iterable[int], delta: Tuple[int, int], orientation: Orientation
) -> Optional[MoveBatch]:
    lines = set(lines)
    lanes = _lanes(occupancy, lines, orientation)
    if not lanes:
        return None
    grid = AodGrid(orientation, lanes, tuple(sorted(lines)))
    return MoveBatch(grid, from_frame_delta(delta[0], delta[1], orientation))


def _try(occupancy, batches: Sequence[Optional[MoveBatch]]):
    # Replay candidate batches; None if any of them is illegal
    for batch in batches:
        if batch is None:
            continue
        occupancy, violations = apply_batch(occupancy, batch)
        if violations:
            return None
    return occupancy


def _swap_level(
    occupancy: Dict[Coord, Coord],
    a_lines: List[int],
    b_lines: List[int],
    shift: int,
    orientation: Orientation,
) -> Tuple[List[MoveBatch], Dict[Coord, Coord]]:
    # Direct in-plane swap when legal
    direct = [
        _batch(occupancy, a_lines, (shift, 0), orientation),
    ]
    after_a = _try(occupancy, direct)
    if after_a is not None:
        second = _batch(occupancy, b_lines, (-shift, 0), orientation)
        b_atoms = {
            atom for site, atom in occupancy.items() if to_frame(site, orientation)[0] in b_lines
        }
        # the second grid must not pick up atoms that just arrived
        picked = {atom for site, atom in after_a.items() if second and second.grid.selects(site)}
        done = _try(after_a, [second]) if picked == b_atoms else None
        if done is not None:
            return [b for b in direct + [second] if b is not None], done

    lanes = [to_frame(site, orientation)[1] for site in occupancy]
    clearance = max(lanes) - min(lanes) + 1
    for height in range(clearance, clearance + MAX_STAGING_TRIES):
        if orientation == Orientation.Diagonal and (shift + height) % 2:
            continue
        out_a = _batch(occupancy, a_lines, (shift, -height), orientation)
        staged = _try(occupancy, [out_a])
        if staged is None:
            continue
        # lanes come from the unstaged occupancy so the grid skips the staged A atoms
        out_b = _batch(occupancy, b_lines, (-shift, -height), orientation)
        staged = _try(staged, [out_b])
        if staged is None:
            continue
        targets = [line + shift for line in a_lines] + [line - shift for line in b_lines]
        staging_lanes = {
            to_frame(site, orientation)[1]
            for site in staged
            if to_frame(site, orientation)[0] in targets
            and to_frame(site, orientation)[1] < min(lanes)
        }
        back = MoveBatch(
            AodGrid(orientation, tuple(sorted(staging_lanes)), tuple(sorted(targets))),
            from_frame_delta(0, height, orientation),
        )
        done = _try(staged, [back])
        if done is not None:
            return [b for b in (out_a, out_b, back) if b is not None], done

    raise PlanError(f"no legal staging height for lines {a_lines} and {b_lines}")


def plan_reflection(
    sites: Iterable[Coord], axis: int, orientation: Orientation
) -> RearrangementPlan:
    """
    Plan the reflection of the atoms at `sites` about an axis.

    Each level of the recursion swaps the first and last halves of every
    block of lines (a middle line of an odd block stays put) and recurses on
    the halves, so an n-line reflection takes at most three batches per level
    and ceil(log2 n) levels.

    Parameters
    ----------
    sites : set of Coord
        Occupied sites.
    axis : int
        Mirror line `x = axis` (horizontal) or mirror diagonal `x - y = axis`
        (diagonal), in doubled coordinates.
    orientation : Orientation
        The AOD used.

    Returns
    -------
    plan : RearrangementPlan

    Raises
    ------
    PlanError
        If the occupied lines are not symmetric about the axis or not equally
        spaced.
    """

    sites = sorted(set(sites))
    target = reflection_map(sites, axis, orientation)
    lines = _line_values(sites, axis, orientation)
    if len(lines) <= 1:
        return RearrangementPlan([], target)

    gap = lines[1] - lines[0]
    occupancy = {site: site for site in sites}
    batches: List[MoveBatch] = []

    blocks = [(0, len(lines))]
    while any(length >= 2 for _, length in blocks):
        a_lines, b_lines, next_blocks = [], [], []
        shift = None
        for start, length in blocks:
            if length < 2:
                continue
            half = length // 2
            shift = (length - half) * gap
            a_lines += lines[start:start + half]
            b_lines += lines[start + length - half:start + length]
            next_blocks += [(start, half), (start + length - half, half)]

        level, occupancy = _swap_level(occupancy, a_lines, b_lines, shift, orientation)
        batches += level
        blocks = next_blocks

    plan = RearrangementPlan(batches, target)
    report = verify_plan(plan, sites)
    if not report.accepted:
        raise PlanError(
            f"{orientation} reflection plan rejected: "
            + "; ".join(str(v) for v in report.violations[:3])
        )
    logger.debug(
        "%s reflection of %s lines: %s batches", orientation, len(lines), len(batches)
    )

    return plan


def rotation_target(sites: Iterable[Coord], center: int) -> Dict[Coord, Coord]:
    """
    The quarter-turn `(x, y) -> (y, 2c - x)` about the patch center.
    """

    return {q: Coord(q.y2, 2 * center - q.x2) for q in sites}


def plan_rotation(sites: Iterable[Coord], center: Optional[int] = None) -> RearrangementPlan:
    """
    Plan the quarter-turn of a square patch: a horizontal reflection about
    `x = center` followed by a diagonal reflection about `x = y`.
    """

    sites = sorted(set(sites))
    if center is None:
        xs = [q.x2 for q in sites]
        if (min(xs) + max(xs)) % 2:
            raise PlanError("patch has no lattice center")
        center = (min(xs) + max(xs)) // 2

    horizontal = plan_reflection(sites, center, Orientation.Horizontal)
    reflected = sorted(horizontal.target.values())
    diagonal = plan_reflection(reflected, 0, Orientation.Diagonal)

    plan = horizontal + diagonal
    logger.info("Rotation plan: %s batches for %s sites", len(plan.batches), len(sites))

    return plan


@dataclass
class AddressingReport:
    x_diagonals: Tuple[int, ...]
    z_diagonals: Tuple[int, ...]
    horizontal_extra: Tuple[Coord, ...]

    @property
    def disjoint(self) -> bool:
        return not set(self.x_diagonals) & set(self.z_diagonals)


def check_diagonal_addressing(layout: Layout) -> AddressingReport:
    """
    Compare diagonal and horizontal addressing of the X ancillas.

    X and Z ancillas lie on distinct diagonals `x - y = const`; the product
    grid of the rows and columns holding X ancillas also selects Z ancillas,
    which are reported in `horizontal_extra`.
    """

    x_diagonals = tuple(sorted({q.x2 - q.y2 for q in layout.ancilla_x}))
    z_diagonals = tuple(sorted({q.x2 - q.y2 for q in layout.ancilla_z}))

    rows = {q.y2 for q in layout.ancilla_x}
    cols = {q.x2 for q in layout.ancilla_x}
    extra = tuple(q for q in layout.ancilla_z if q.x2 in cols and q.y2 in rows)

    return AddressingReport(x_diagonals, z_diagonals, extra)
