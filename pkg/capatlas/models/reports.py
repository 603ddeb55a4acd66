"""
This module contains the report models written by the verify, search and placements actions
"""

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field


# pylint: disable=too-few-public-methods

class Expected(BaseModel):
    """
    Expected value of a check with its provenance
    """
    value: Any
    provenance: Literal["PAPER", "TRIVIAL", "DERIVED"]
    quote: Optional[str] = None


class CheckReport(BaseModel):
    """
    Verdict of one registry check
    """
    id: str
    passed: bool
    observed: Any = None
    expected: Optional[Expected] = None
    seconds: float = 0.0
    witness: Optional[Any] = None


class CheckSummary(BaseModel):
    """
    Result of run_all, reports sorted by id
    """
    maxRuntime: str
    passed: int
    failed: int
    reports: List[CheckReport] = Field(default=[])


class SearchReport(BaseModel):
    """
    Written next to the result cap files of a search job
    """
    dimension: int
    target: int
    nodes: int
    seconds: float
    results: List[str] = Field(default=[])
    isomorphFree: bool = False


class PlacementRecord(BaseModel):
    """
    One placement with its middle level statistics
    """
    index: int
    kind: str
    linear: List[List[int]]
    shift: List[int]
    n0: int
    n2: int


class PlacementReport(BaseModel):
    """
    Written by the placements action
    """
    base: str
    mode: str
    convention: str
    count: int
    seconds: float
    census: Dict[str, int] = Field(default={})
    placements: List[PlacementRecord] = Field(default=[])


class FeatureReport(BaseModel):
    """
    Named substructures of an 18-cap 4-flat (882A2) or of a 45-cap 5-flat; vectors are coordinate lists,
    directions are lists of functional rows
    """
    kind: Literal["882A2", "45cap"]
    nineTwosDirection: Optional[List[List[int]]] = None
    cube855Direction: Optional[List[int]] = None
    cube882Direction: Optional[List[int]] = None
    distinguishedPair: Optional[List[List[int]]] = None
    distinguishedConstants: Optional[List[int]] = None
    standardSquares: Optional[List[List[int]]] = None
    squareOfMidpoints: Optional[List[int]] = None
    planeOfSquare: Optional[List[int]] = None
    axis: Optional[List[int]] = None
    specialThreeFlatDirections: Optional[int] = None
    categories: Optional[Dict[str, int]] = None
