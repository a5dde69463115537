"""Orientation bookkeeping after a topple: limb-role remapping and recovery planning.

The four limb axes point at the vertices of a regular tetrahedron, so any
resting orientation looks like the canonical one with the limb labels
permuted.  There are 12 such orientations (4 choices of top limb x 3 rolls
of the lower triad), matching the even permutations of the labels; each is
realized by an exact body rotation when the axes are built from the ideal
inter-axis angle acos(-1/3).  The physical mount angle differs from ideal
by ~0.04 deg, which is irrelevant at the level of role assignment.

A remap table answers "which role does each physical limb play now, and how
is its local frame spun about its own axis" so gait targets computed for
roles can be replayed on the physical limbs.  Recovery is planned over the
same group: pivoting the body +-120 deg about one limb axis is a generator,
and every orientation is at most two pivots from canonical.
"""
from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass
from typing import Dict, Mapping, Tuple

import numpy as np

from .tetra_frames import LimbId

__all__ = [
    "CANONICAL",
    "DEFAULT_MANEUVER_CYCLES",
    "IDEAL_AXIS_ANGLE",
    "ManeuverStep",
    "OrientationState",
    "PIVOT_GENERATORS",
    "RemapTable",
    "all_orientations",
    "apply_maneuver",
    "apply_remap",
    "correction_maneuver",
    "random_orientation",
    "remap_for",
    "topple_left",
    "topple_right",
]

IDEAL_AXIS_ANGLE = math.acos(-1.0 / 3.0)

#: gait cycles spent per pivot maneuver before the orientation transition
DEFAULT_MANEUVER_CYCLES = 3

_LIMBS: Tuple[LimbId, ...] = (LimbId.LIMB1, LimbId.LIMB2, LimbId.LIMB3, LimbId.LIMB4)

Permutation = Dict[LimbId, LimbId]


@dataclass(frozen=True)
class OrientationState:
    """Resting orientation: which limb points up, and how the lower triad is rolled.

    ``roll_index`` counts 120-degree rotations of the lower triad about the
    top limb's axis.  The canonical state is ``(LIMB1, 0)``.
    """

    top_limb: LimbId
    roll_index: int

    def __post_init__(self) -> None:
        if self.top_limb not in _LIMBS:
            raise ValueError(f"unknown limb {self.top_limb!r}")
        if self.roll_index not in (0, 1, 2):
            raise ValueError(f"roll_index must be 0, 1 or 2, got {self.roll_index}")

    @property
    def is_canonical(self) -> bool:
        return self.top_limb is LimbId.LIMB1 and self.roll_index == 0

    @property
    def permutation(self) -> Permutation:
        """Role played by each physical limb (physical -> role)."""
        return dict(_STATE_PERMS[self])

    @classmethod
    def from_permutation(cls, perm: Mapping[LimbId, LimbId]) -> "OrientationState":
        key = tuple(perm[p] for p in _LIMBS)
        try:
            return _PERM_TO_STATE[key]
        except KeyError:
            raise ValueError(f"permutation {dict(perm)!r} is not a resting orientation") from None


CANONICAL = OrientationState(LimbId.LIMB1, 0)


@dataclass(frozen=True)
class ManeuverStep:
    """One recovery pivot: roll the body 120 deg about ``pivot_limb``'s axis.

    ``direction`` +1 is a right-handed roll about the outward limb axis; the
    pivoting limb sweeps its tip circle that way for ``cycles`` gait cycles.
    """

    pivot_limb: LimbId
    direction: int
    cycles: int = DEFAULT_MANEUVER_CYCLES

    def __post_init__(self) -> None:
        if self.direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")
        if self.cycles < 1:
            raise ValueError("cycles must be >= 1")


@dataclass(frozen=True, eq=False)
class RemapTable:
    """Precomputed role reassignment for one orientation.

    ``role_permutation`` maps each physical limb to the role it now plays.
    ``frame_rotation`` is the body rotation realizing the orientation (maps
    canonical limb axes onto their current world directions).  ``local_spin``
    gives, per physical limb, the Z rotation carrying its local frame to the
    frame of the role it plays; planar targets transform by the inverse spin.
    """

    role_permutation: Mapping[LimbId, LimbId]
    frame_rotation: np.ndarray
    local_spin: Mapping[LimbId, float]

    @property
    def acts_as(self) -> Mapping[LimbId, LimbId]:
        return self.role_permutation

    @property
    def role_to_phys(self) -> Dict[LimbId, LimbId]:
        return {role: phys for phys, role in self.role_permutation.items()}

    @property
    def is_identity(self) -> bool:
        return all(self.role_permutation[p] is p for p in _LIMBS)


def _rot_z(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _rot_y(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _axis_rotation(axis: np.ndarray, angle: float) -> np.ndarray:
    x, y, z = axis
    k = np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
    return np.eye(3) + math.sin(angle) * k + (1.0 - math.cos(angle)) * (k @ k)


# base frames rebuilt from the ideal angle so every state is an exact rotation
_BASE: Dict[LimbId, np.ndarray] = {
    LimbId.LIMB1: np.eye(3),
    LimbId.LIMB2: _rot_y(IDEAL_AXIS_ANGLE),
    LimbId.LIMB3: _rot_z(2.0 * math.pi / 3.0) @ _rot_y(IDEAL_AXIS_ANGLE),
    LimbId.LIMB4: _rot_z(4.0 * math.pi / 3.0) @ _rot_y(IDEAL_AXIS_ANGLE),
}
_AXIS: Dict[LimbId, np.ndarray] = {p: _BASE[p][:, 2].copy() for p in _LIMBS}

# rolling 120 deg about the top limb cycles the lower triad 2 -> 3 -> 4
_TRIAD_CYCLE: Permutation = {
    LimbId.LIMB1: LimbId.LIMB1,
    LimbId.LIMB2: LimbId.LIMB3,
    LimbId.LIMB3: LimbId.LIMB4,
    LimbId.LIMB4: LimbId.LIMB2,
}


def _compose(f: Permutation, g: Permutation) -> Permutation:
    """f after g."""
    return {p: f[g[p]] for p in _LIMBS}


def _swap_with_top(top: LimbId) -> Permutation:
    """Even permutation putting ``top`` into the up role with zero roll."""
    if top is LimbId.LIMB1:
        return {p: p for p in _LIMBS}
    rest = [p for p in (LimbId.LIMB2, LimbId.LIMB3, LimbId.LIMB4) if p is not top]
    out = {LimbId.LIMB1: top, top: LimbId.LIMB1, rest[0]: rest[1], rest[1]: rest[0]}
    return {p: out[p] for p in _LIMBS}


def _rotation_for(perm: Permutation) -> np.ndarray:
    # the axes satisfy sum a a^T = 4/3 I, so the fit is a plain projection
    a = np.column_stack([_AXIS[p] for p in _LIMBS])
    b = np.column_stack([_AXIS[perm[p]] for p in _LIMBS])
    return 0.75 * (b @ a.T)


def _spin_angle(m: np.ndarray) -> float:
    if abs(m[2, 2] - 1.0) > 1e-9:
        raise AssertionError("correction is not a pure Z rotation")
    raw = math.atan2(m[1, 0], m[0, 0])
    # provably a multiple of pi/3; snap off float dust so the canonical
    # table leaves targets bit-identical
    snapped = round(raw / (math.pi / 3.0)) * (math.pi / 3.0)
    if abs(snapped - raw) > 1e-9:
        raise AssertionError("correction angle is not a multiple of pi/3")
    return snapped


def _build_tables() -> Tuple[Dict[OrientationState, Permutation], Dict[OrientationState, RemapTable]]:
    perms: Dict[OrientationState, Permutation] = {}
    tables: Dict[OrientationState, RemapTable] = {}
    cyc_pow = {0: {p: p for p in _LIMBS}}
    cyc_pow[1] = _TRIAD_CYCLE
    cyc_pow[2] = _compose(_TRIAD_CYCLE, _TRIAD_CYCLE)
    for top in _LIMBS:
        for roll in (0, 1, 2):
            state = OrientationState(top, roll)
            perm = _compose(cyc_pow[roll], _swap_with_top(top))
            rot = _rotation_for(perm)
            spin = {
                p: _spin_angle(_BASE[perm[p]].T @ rot @ _BASE[p])
                for p in _LIMBS
            }
            perms[state] = perm
            tables[state] = RemapTable(
                role_permutation=dict(perm), frame_rotation=rot, local_spin=spin
            )
    return perms, tables


_STATE_PERMS, _TABLES = _build_tables()
_PERM_TO_STATE: Dict[Tuple[LimbId, ...], OrientationState] = {
    tuple(perm[p] for p in _LIMBS): state for state, perm in _STATE_PERMS.items()
}


def _generator_perm(limb: LimbId, direction: int) -> Permutation:
    rot = _axis_rotation(_AXIS[limb], direction * 2.0 * math.pi / 3.0)
    out: Permutation = {}
    for p in _LIMBS:
        v = rot @ _AXIS[p]
        matches = [q for q in _LIMBS if np.allclose(v, _AXIS[q], atol=1e-9)]
        if len(matches) != 1:
            raise AssertionError("pivot does not permute the limb axes")
        out[p] = matches[0]
    return out


#: permutation action of each recovery pivot, keyed by (pivot limb, direction)
PIVOT_GENERATORS: Dict[Tuple[LimbId, int], Permutation] = {
    (limb, direction): _generator_perm(limb, direction)
    for limb in _LIMBS
    for direction in (1, -1)
}


def all_orientations() -> Tuple[OrientationState, ...]:
    """The 12 resting orientations, canonical first, in (top, roll) order."""
    return tuple(sorted(_TABLES, key=lambda s: (int(s.top_limb), s.roll_index)))


def remap_for(orientation: OrientationState) -> RemapTable:
    """Precomputed remap table for a resting orientation."""
    return _TABLES[orientation]


def apply_remap(
    table: RemapTable,
    targets: Mapping[LimbId, Tuple[float, float]],
) -> Dict[LimbId, Tuple[float, float]]:
    """Reassign per-role planar targets to physical limbs.

    Each physical limb receives the target of the role it plays, expressed
    in its own local frame: coordinates transform by the inverse of the
    frame spin.  Rotation preserves target norms, so workspace feasibility
    is unchanged.
    """
    out: Dict[LimbId, Tuple[float, float]] = {}
    for phys in _LIMBS:
        role = table.role_permutation[phys]
        x, y = targets[role]
        a = -table.local_spin[phys]
        c, s = math.cos(a), math.sin(a)
        out[phys] = (c * x - s * y, s * x + c * y)
    return out


def apply_maneuver(state: OrientationState, step: ManeuverStep) -> OrientationState:
    """Orientation after one recovery pivot."""
    perm = _compose(_STATE_PERMS[state], PIVOT_GENERATORS[(step.pivot_limb, step.direction)])
    return OrientationState.from_permutation(perm)


def correction_maneuver(
    current: OrientationState,
    target: OrientationState = CANONICAL,
    cycles: int = DEFAULT_MANEUVER_CYCLES,
) -> Tuple[ManeuverStep, ...]:
    """Shortest pivot sequence carrying ``current`` to ``target``.

    Breadth-first search over the orientation graph; the 120-degree pivots
    generate the whole group, so the plan never exceeds two steps.  Returns
    an empty tuple when already at the target.
    """
    goal = tuple(_STATE_PERMS[target][p] for p in _LIMBS)
    start = tuple(_STATE_PERMS[current][p] for p in _LIMBS)
    if start == goal:
        return ()
    parents: Dict[Tuple[LimbId, ...], Tuple[Tuple[LimbId, ...], Tuple[LimbId, int]]] = {}
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        cur_perm = dict(zip(_LIMBS, cur))
        for key in sorted(PIVOT_GENERATORS, key=lambda k: (int(k[0]), -k[1])):
            nxt = tuple(_compose(cur_perm, PIVOT_GENERATORS[key])[p] for p in _LIMBS)
            if nxt in seen:
                continue
            seen.add(nxt)
            parents[nxt] = (cur, key)
            if nxt == goal:
                steps = []
                node = nxt
                while node != start:
                    node, key2 = parents[node]
                    steps.append(ManeuverStep(key2[0], key2[1], cycles))
                plan = tuple(reversed(steps))
                if len(plan) > 2:
                    raise AssertionError("orientation graph diameter exceeded")
                return plan
            queue.append(nxt)
    raise AssertionError("orientation graph is disconnected")


def topple_left() -> OrientationState:
    """Orientation after rolling left (+120 deg) about the forward limb axis."""
    return _PIVOT_STATES[1]


def topple_right() -> OrientationState:
    """Orientation after rolling right (-120 deg) about the forward limb axis."""
    return _PIVOT_STATES[-1]


_PIVOT_STATES = {
    d: OrientationState.from_permutation(PIVOT_GENERATORS[(LimbId.LIMB2, d)])
    for d in (1, -1)
}


def random_orientation(rng: random.Random | None = None) -> OrientationState:
    """Uniformly random resting orientation (for injected topples)."""
    choice = (rng or random).choice(all_orientations())
    return choice
