"""Enumeration caps.

Every exhaustive oracle takes an explicit cap and raises
:class:`~forge.errors.SizeError` instead of truncating.  The defaults can be
scaled globally with the ``FORGE_CAP_MODE`` environment variable
(``tiny``, ``default`` or ``max``).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

from .errors import ParameterError


@dataclass(frozen=True)
class Caps:
    subset_vertices: int = 20          # 2^N vertex-subset enumerations
    combinations: int = 10**6          # C(M, h) edge-subset enumerations
    matrix_entries: int = 5 * 10**6    # entries of any constructed matrix
    box_vectors: int = 5 * 10**6       # coefficient-box enumerations
    kernel_combinations: int = 3**10   # {-1,0,1} combos of a kernel basis
    support_enumeration: int = 12      # exact support scan when M^q <= this
    closed_sets: int = 4 * 10**7      # candidate sets in legal expansion
    messages: int = 10**6              # |F|^M codeword enumerations
    walks: int = 10**6                 # n * degree^(r-1)
    collision_side: int = 3**12        # one half of the meet-in-the-middle


_MODES = {
    "tiny": Caps(
        subset_vertices=10,
        combinations=10**4,
        matrix_entries=10**5,
        box_vectors=10**4,
        kernel_combinations=3**6,
        support_enumeration=8,
        closed_sets=10**4,
        messages=10**4,
        walks=10**4,
        collision_side=3**6,
    ),
    "default": Caps(),
    "max": Caps(
        subset_vertices=24,
        combinations=10**8,
        matrix_entries=10**8,
        box_vectors=10**8,
        kernel_combinations=3**14,
        support_enumeration=16,
        closed_sets=2 * 10**8,
        messages=10**8,
        walks=10**8,
        collision_side=3**15,
    ),
}


def caps_for(mode: str | None = None) -> Caps:
    if mode is None:
        mode = os.environ.get("FORGE_CAP_MODE", "default")
    try:
        return _MODES[mode]
    except KeyError:
        raise ParameterError(f"unknown cap mode {mode!r}; expected one of {sorted(_MODES)}") from None


def current() -> Caps:
    return caps_for(None)


def with_overrides(caps: Caps, **kw: int) -> Caps:
    return replace(caps, **kw)
