"""States and exact jump dynamics of the two-sided multi-species model.

A state is a pair ``(positions, species)``: strictly increasing lattice
sites and the species label of the particle sitting on each of them,
read left to right.  Higher labels have priority.

Right jumps are long-range: the jumping particle moves one site at a time,
and whenever two particles share a site the larger label keeps it while the
smaller one moves on to the next site.  An empty site behaves like label 0.
Left jumps follow the multi-species TASEP rule: move onto an empty site,
swap with a strictly smaller label, otherwise give up.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

__all__ = [
    "MarkovState",
    "Transition",
    "InvalidState",
    "state",
    "validate_state",
    "apply_right_jump",
    "apply_left_jump",
    "enumerate_transitions",
    "exit_rate",
    "state_from_json",
    "state_to_json",
]


class InvalidState(ValueError):
    """Raised when a state literal violates the exclusion or shape rules."""


@dataclass(frozen=True, order=True)
class MarkovState:
    positions: tuple[int, ...]
    species: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(int(x) for x in self.positions))
        object.__setattr__(self, "species", tuple(int(s) for s in self.species))

    @property
    def n(self) -> int:
        return len(self.positions)

    def multiset(self) -> tuple[int, ...]:
        return tuple(sorted(self.species))

    def __str__(self):
        pos = ",".join(map(str, self.positions))
        return f"({pos}|{''.join(map(str, self.species))})"


@dataclass(frozen=True)
class Transition:
    target: MarkovState
    rate: float


def validate_state(st: MarkovState) -> Optional[str]:
    """Return ``None`` for a valid state, else a description of the first
    violated invariant."""
    if len(st.positions) != len(st.species):
        return (
            f"length mismatch: {len(st.positions)} positions "
            f"vs {len(st.species)} species"
        )
    for a, b in zip(st.positions, st.positions[1:]):
        if not a < b:
            return f"positions not strictly increasing: {a} >= {b}"
    for s in st.species:
        if s < 1:
            return f"species labels must be positive integers, got {s}"
    return None


def state(positions: Sequence[int], species: Sequence[int]) -> MarkovState:
    """Build a state and check it, raising :class:`InvalidState`."""
    st = MarkovState(tuple(positions), tuple(species))
    err = validate_state(st)
    if err is not None:
        raise InvalidState(err)
    return st


def _check_index(st: MarkovState, k: int):
    if not 1 <= k <= st.n:
        raise IndexError(f"particle index {k} outside 1..{st.n}")


def apply_right_jump(st: MarkovState, k: int) -> MarkovState:
    """Particle ``k`` (1-based, counted from the left) jumps right.

    Resolved as a chain of two-body collisions: the mover steps onto the
    next site; if that site holds ``l'``, the larger of the two labels stays
    and the smaller keeps moving.  The chain ends on the first empty site.
    """
    _check_index(st, k)
    occ = dict(zip(st.positions, st.species))
    x = st.positions[k - 1]
    mover = occ.pop(x)
    while True:
        x += 1
        resident = occ.get(x)
        if resident is None:
            occ[x] = mover
            break
        occ[x] = max(mover, resident)
        mover = min(mover, resident)
    sites = sorted(occ)
    return MarkovState(tuple(sites), tuple(occ[s] for s in sites))


def apply_left_jump(st: MarkovState, k: int) -> Optional[MarkovState]:
    """Particle ``k`` jumps left; returns ``None`` when the jump is blocked."""
    _check_index(st, k)
    i = k - 1
    pos, spc = list(st.positions), list(st.species)
    x, lab = pos[i], spc[i]
    if i == 0 or pos[i - 1] < x - 1:
        pos[i] = x - 1
        return MarkovState(tuple(pos), tuple(spc))
    if spc[i - 1] < lab:
        spc[i - 1], spc[i] = spc[i], spc[i - 1]
        return MarkovState(tuple(pos), tuple(spc))
    return None


def enumerate_transitions(st: MarkovState, p: float) -> list[Transition]:
    """All enabled moves out of ``st``, one entry per (particle, direction).

    Right jumps fire at rate ``p`` and are always enabled; left jumps fire
    at rate ``1 - p`` when not blocked.  Entries with equal targets are not
    merged.  Zero-rate moves (``p`` equal to 0 or 1) are dropped.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    q = 1.0 - p
    out = []
    for k in range(1, st.n + 1):
        if p > 0:
            out.append(Transition(apply_right_jump(st, k), p))
        if q > 0:
            tgt = apply_left_jump(st, k)
            if tgt is not None:
                out.append(Transition(tgt, q))
    return out


def exit_rate(st: MarkovState, p: float) -> float:
    return sum(tr.rate for tr in enumerate_transitions(st, p))


def species_multiset(st: MarkovState) -> Counter:
    return Counter(st.species)


def state_from_json(text: str | dict) -> MarkovState:
    """Parse ``{"positions": [...], "species": [...]}``."""
    obj = json.loads(text) if isinstance(text, str) else text
    try:
        positions, species = obj["positions"], obj["species"]
    except (KeyError, TypeError) as exc:
        raise InvalidState(f"state literal needs 'positions' and 'species': {exc}")
    if any(isinstance(v, bool) or not isinstance(v, int) for v in [*positions, *species]):
        raise InvalidState("positions and species must be integer arrays")
    return state(positions, species)


def state_to_json(st: MarkovState) -> str:
    return json.dumps({"positions": list(st.positions), "species": list(st.species)})
