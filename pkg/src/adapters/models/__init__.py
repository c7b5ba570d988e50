"""
Models package for infrastructure layer.
Contains Pydantic models for study configuration and result artifacts.
"""

from .models import (
    DistributionModel,
    GridModel,
    ScenarioModel,
    SeparationSidecarModel,
    SolverSettingsModel,
    StudyConfigModel,
    StudySummaryModel,
    SummaryRowModel,
    TiltModelModel,
    WhiteningModel,
    json_pointer,
    parse_study_config,
)

__all__ = [
    "DistributionModel",
    "GridModel",
    "ScenarioModel",
    "SeparationSidecarModel",
    "SolverSettingsModel",
    "StudyConfigModel",
    "StudySummaryModel",
    "SummaryRowModel",
    "TiltModelModel",
    "WhiteningModel",
    "json_pointer",
    "parse_study_config",
]
