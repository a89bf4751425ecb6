"""File records and output documents.

Records use 1-based node ids, as written to and read from files.
"""
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

AreaName = Literal["residential", "commercial", "other"]


class NodeRecord(BaseModel):
    """A node in a network file."""

    model_config = ConfigDict(extra="forbid")

    id: int = Field(..., ge=1, description="1-based node id.")
    area: AreaName = Field("other", description="Land-use class of the node.")
    x: Optional[float] = Field(None, description="Layout x coordinate.")
    y: Optional[float] = Field(None, description="Layout y coordinate.")


class EdgeRecord(BaseModel):
    """A road in a network file."""

    model_config = ConfigDict(extra="forbid")

    a: int = Field(..., ge=1, description="1-based id of one end.")
    b: int = Field(..., ge=1, description="1-based id of the other end.")
    length: float = Field(..., description="Road length in distance units.")


class NetworkRecord(BaseModel):
    """Content of a network JSON file."""

    model_config = ConfigDict(extra="forbid")

    nodes: List[NodeRecord] = Field(..., description="All nodes.")
    edges: List[EdgeRecord] = Field(default_factory=list, description="All roads.")


class TripRecord(BaseModel):
    """A trip in a trips file."""

    model_config = ConfigDict(extra="forbid")

    origin: int = Field(..., ge=1, description="1-based origin node id.")
    destination: int = Field(..., ge=1, description="1-based destination node id.")
    route: List[int] = Field(
        ..., min_length=1, description="1-based node ids from origin to destination."
    )
    soc_ini: float = Field(..., description="SOC at the origin.")
    capacity: float = Field(..., description="Full battery charge.")


class DetourEventRecord(BaseModel):
    """A forced detour, with 1-based node ids."""

    at_node: int = Field(..., description="Route node where the detour starts.")
    station: int = Field(..., description="Station used for recharging.")
    next_node: int = Field(..., description="Route node where the trip resumes.")
    extra_soc: float = Field(
        ..., description="Energy of the detour beyond the skipped road."
    )


class TripReport(BaseModel):
    """Evaluation of one trip under a deployment."""

    index: int = Field(..., description="Position of the trip in the trips file.")
    score: float = Field(..., description="Unsatisfied SOC of the trip.")
    chosen_m: int = Field(
        ..., description="Number of detours giving the least unsatisfied SOC."
    )
    num_detours: int = Field(..., description="Detours taken by the full simulation.")
    reached: bool = Field(
        ..., description="Whether the destination is reached after all detours."
    )
    strand_node: Optional[int] = Field(
        None, description="Where the chosen plan strands, if it does."
    )
    events: List[DetourEventRecord] = Field(
        default_factory=list, description="Detours of the full simulation."
    )


class EvaluationReport(BaseModel):
    """Evaluation of a charging station deployment."""

    stations: List[int] = Field(..., description="1-based station node ids.")
    params: Dict[str, Any] = Field(..., description="Evaluation parameters.")
    total_unsatisfied_soc: float = Field(
        ..., description="Sum of unsatisfied SOC over all trips."
    )
    fit_value: float = Field(..., description="1 / (1 + total unsatisfied SOC).")
    trips: List[TripReport] = Field(default_factory=list, description="Per-trip data.")


class CurvePoint(BaseModel):
    """Population fitness of one generation."""

    generation: int = Field(..., description="Generation index, counting from 0.")
    best_fit: float = Field(..., description="Highest fit value in the population.")
    mean_fit: float = Field(..., description="Mean fit value of the population.")


class GaRunDocument(BaseModel):
    """Outputs of a genetic algorithm run."""

    config: Dict[str, Any] = Field(..., description="GA and evaluation settings.")
    best_stations: List[int] = Field(
        ..., description="1-based station node ids of the best deployment."
    )
    best_unsatisfied_soc: float = Field(
        ..., description="Total unsatisfied SOC of the best deployment."
    )
    fit_value: float = Field(..., description="Fit value of the best deployment.")
    num_evaluated: int = Field(
        ..., description="Number of distinct deployments evaluated."
    )
    curve: List[CurvePoint] = Field(
        default_factory=list, description="Fit value curve over generations."
    )


class OracleDocument(BaseModel):
    """Exact optimum found by exhaustive enumeration."""

    k: int = Field(..., description="Number of stations.")
    stations: List[int] = Field(..., description="1-based station node ids.")
    unsatisfied_soc: float = Field(..., description="Optimal total unsatisfied SOC.")
    fit_value: float = Field(..., description="Fit value of the optimum.")
    num_candidates: int = Field(..., description="Number of deployments enumerated.")
