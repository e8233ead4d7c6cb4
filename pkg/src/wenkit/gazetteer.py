"""Historical place hierarchy with period validity and coordinates.

Supports name resolution (canonical and variant names, optionally filtered
by a validity year) and relation classification between two places:
identity, jurisdictional containment at any depth, siblinghood under one
parent, coordinate proximity, or no relation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

EARTH_RADIUS_KM = 6371.0088
DEFAULT_NEAR_THRESHOLD_KM = 30.0


@dataclass(frozen=True)
class Place:
    place_id: str
    name: str
    variants: frozenset[str] = frozenset()
    parent: Optional[str] = None
    valid_period: Optional[tuple[int, int]] = None
    coordinates: Optional[tuple[float, float]] = None  # (lat, lon) degrees

    def __post_init__(self):
        if self.valid_period is not None and self.valid_period[0] > self.valid_period[1]:
            raise ValueError(f"bad validity period for {self.place_id}")
        if self.coordinates is not None:
            lat, lon = self.coordinates
            if not -90 <= lat <= 90:
                raise ValueError(f"latitude out of range for {self.place_id}: {lat}")
            if not -180 <= lon <= 180:
                raise ValueError(f"longitude out of range for {self.place_id}: {lon}")

    def names(self) -> frozenset[str]:
        return self.variants | {self.name}

    def valid_in(self, year: int) -> bool:
        if self.valid_period is None:
            return True
        return self.valid_period[0] <= year <= self.valid_period[1]


@dataclass(frozen=True)
class PlaceRelation:
    """Classification of how two places relate.

    kind is one of: identical, contains, contained_by, sibling, near,
    unrelated. levels counts jurisdiction hops for containment; distance_km
    is set for near.
    """

    kind: str
    levels: int = 0
    distance_km: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("identical", "contains", "contained_by", "sibling", "near", "unrelated"):
            raise ValueError(f"unknown relation kind: {self.kind}")
        if self.kind == "near" and (self.distance_km is None or self.distance_km < 0):
            raise ValueError("near relation needs a non-negative distance")

    def inverse(self) -> "PlaceRelation":
        if self.kind == "contains":
            return PlaceRelation("contained_by", self.levels)
        if self.kind == "contained_by":
            return PlaceRelation("contains", self.levels)
        return self


def haversine_km(p1: tuple[float, float], p2: tuple[float, float]) -> float:
    """Great-circle distance in kilometres between (lat, lon) degree pairs."""
    if p1 is None or p2 is None:
        raise ValueError("both coordinate pairs are required")
    lat1, lon1 = map(math.radians, p1)
    lat2, lon2 = map(math.radians, p2)
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    a = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(a)))


class Gazetteer:
    """Immutable registry of places; parent chains are checked acyclic at load."""

    def __init__(self, places: Iterable[Place]):
        self._places: dict[str, Place] = {}
        for place in places:
            if place.place_id in self._places:
                raise ValueError(f"duplicate place_id: {place.place_id}")
            self._places[place.place_id] = place
        self._by_name: dict[str, list[Place]] = {}
        for place in self._places.values():
            for name in sorted(place.names()):
                self._by_name.setdefault(name, []).append(place)
        self._check_acyclic()

    def _check_acyclic(self) -> None:
        for place in self._places.values():
            seen = {place.place_id}
            current = place.parent
            while current is not None:
                if current in seen:
                    raise ValueError(f"parent cycle through {current}")
                if current not in self._places:
                    raise ValueError(f"{place.place_id} references unknown parent {current}")
                seen.add(current)
                current = self._places[current].parent

    def __len__(self) -> int:
        return len(self._places)

    def place(self, place_id: str) -> Place:
        return self._places[place_id]

    def resolve_name(self, name: str, asof_year: Optional[int] = None) -> list[Place]:
        """Every place matching the name; ambiguity is never collapsed."""
        matches = self._by_name.get(name, [])
        if asof_year is not None:
            matches = [p for p in matches if p.valid_in(asof_year)]
        return sorted(matches, key=lambda p: p.place_id)

    def ancestors(self, place: Place) -> list[str]:
        chain = []
        current = place.parent
        while current is not None:
            chain.append(current)
            current = self._places[current].parent
        return chain

    def classify_relation(
        self,
        a: Place,
        b: Place,
        near_threshold_km: float = DEFAULT_NEAR_THRESHOLD_KM,
    ) -> PlaceRelation:
        """Strongest relation between two places.

        Precedence: identical, then containment through the parent chain
        (levels counted), then sibling under the same immediate parent,
        then coordinate proximity, then unrelated. When both places carry
        validity periods that do not intersect, only the coordinate-based
        relations apply.
        """
        if a.place_id == b.place_id:
            return PlaceRelation("identical")

        periods_disjoint = (
            a.valid_period is not None
            and b.valid_period is not None
            and (a.valid_period[1] < b.valid_period[0] or b.valid_period[1] < a.valid_period[0])
        )
        if not periods_disjoint:
            ancestors_a = self.ancestors(a)
            ancestors_b = self.ancestors(b)
            if b.place_id in ancestors_a:
                return PlaceRelation("contained_by", ancestors_a.index(b.place_id) + 1)
            if a.place_id in ancestors_b:
                return PlaceRelation("contains", ancestors_b.index(a.place_id) + 1)
            if a.parent is not None and a.parent == b.parent:
                return PlaceRelation("sibling")
        if a.coordinates is not None and b.coordinates is not None:
            distance = haversine_km(a.coordinates, b.coordinates)
            if distance <= near_threshold_km:
                return PlaceRelation("near", distance_km=distance)
        return PlaceRelation("unrelated")

    # -- loading ------------------------------------------------------------

    @classmethod
    def load(cls, path: Path | str) -> "Gazetteer":
        """Load the tab-separated gazetteer table.

        Columns: place_id, name, variants (| separated, may be empty),
        parent_id, start_year, end_year, lat, lon. Empty cells mean absent.
        """
        places = []
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh, delimiter="\t")
            required = {"place_id", "name", "variants", "parent_id", "start_year", "end_year", "lat", "lon"}
            if reader.fieldnames is None or not required <= set(reader.fieldnames):
                raise ValueError(f"gazetteer file missing columns: {sorted(required)}")
            for row in reader:
                period = None
                if row["start_year"].strip() and row["end_year"].strip():
                    period = (int(row["start_year"]), int(row["end_year"]))
                coords = None
                if row["lat"].strip() and row["lon"].strip():
                    coords = (float(row["lat"]), float(row["lon"]))
                variants = frozenset(v for v in row["variants"].split("|") if v)
                places.append(
                    Place(
                        place_id=row["place_id"],
                        name=row["name"],
                        variants=variants,
                        parent=row["parent_id"] or None,
                        valid_period=period,
                        coordinates=coords,
                    )
                )
        return cls(places)

    def dump(self, path: Path | str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
            writer.writerow(["place_id", "name", "variants", "parent_id", "start_year", "end_year", "lat", "lon"])
            for place_id in sorted(self._places):
                p = self._places[place_id]
                writer.writerow([
                    p.place_id,
                    p.name,
                    "|".join(sorted(p.variants)),
                    p.parent or "",
                    p.valid_period[0] if p.valid_period else "",
                    p.valid_period[1] if p.valid_period else "",
                    p.coordinates[0] if p.coordinates else "",
                    p.coordinates[1] if p.coordinates else "",
                ])
