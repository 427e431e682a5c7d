"""Named knot and link diagrams used as atoms."""
from __future__ import annotations

from typing import Callable, Dict

from .linkdiag import OrientedDiagram, from_pd, with_certified

# PD codes follow the incoming-under, counterclockwise convention
_PD = {
    "trefoil": [[1, 5, 2, 4], [3, 1, 4, 6], [5, 3, 6, 2]],
    "figure8": [[4, 2, 5, 1], [8, 6, 1, 5], [6, 3, 7, 4], [2, 7, 3, 8]],
}


def unknot(name: str = "K") -> OrientedDiagram:
    d = OrientedDiagram((), (), ((1,),), (name,))
    return with_certified(d.with_provenance({"op": "atom", "name": "unknot"}), [name])


def trefoil(name: str = "K") -> OrientedDiagram:
    """The positive (right-handed) trefoil."""
    return from_pd(_PD["trefoil"], names=[name]).with_provenance({"op": "atom", "name": "trefoil"})


def figure8(name: str = "K") -> OrientedDiagram:
    return from_pd(_PD["figure8"], names=[name]).with_provenance({"op": "atom", "name": "figure8"})


def hopf(sign: int = 1, names=("K", "a")) -> OrientedDiagram:
    """Two round unknots with linking number ``sign``."""
    pd = [[1, 3, 2, 4], [3, 1, 4, 2]] if sign > 0 else [[4, 1, 3, 2], [2, 3, 1, 4]]
    d = from_pd(pd, names=list(names)).with_provenance({"op": "atom", "name": "hopf", "sign": sign})
    return with_certified(d, list(names))


KNOTS: Dict[str, Callable[..., OrientedDiagram]] = {
    "unknot": unknot,
    "trefoil": trefoil,
    "figure8": figure8,
}


def knot_by_name(name: str) -> OrientedDiagram:
    try:
        return KNOTS[name]()
    except KeyError:
        raise ValueError(f"unknown knot {name!r}; choose from {sorted(KNOTS)}") from None
