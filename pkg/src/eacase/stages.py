"""Lifecycle taxonomy for data-driven technologies.

Thirteen stages grouped into three macro-stages (design, development,
deployment). Stage identifiers are stable snake_case tokens; they appear in
the case language, in coverage reports, and in pattern slot bindings.
"""

from __future__ import annotations

from enum import Enum


class MacroStage(str, Enum):
    """Top-level grouping of the project lifecycle."""

    DESIGN = "design"
    DEVELOPMENT = "development"
    DEPLOYMENT = "deployment"


class LifecycleStage(str, Enum):
    """One of the thirteen lifecycle stages, in canonical order."""

    PROJECT_PLANNING = "project_planning"
    PROBLEM_FORMULATION = "problem_formulation"
    DATA_EXTRACTION_PROCUREMENT = "data_extraction_procurement"
    DATA_ANALYSIS = "data_analysis"
    PREPROCESSING_FEATURE_ENGINEERING = "preprocessing_feature_engineering"
    MODEL_SELECTION = "model_selection"
    MODEL_TRAINING = "model_training"
    MODEL_VALIDATION_TESTING = "model_validation_testing"
    MODEL_REPORTING = "model_reporting"
    MODEL_PRODUCTIONALIZATION = "model_productionalization"
    USER_TRAINING = "user_training"
    SYSTEM_USE_MONITORING = "system_use_monitoring"
    MODEL_UPDATING_DEPROVISIONING = "model_updating_deprovisioning"

    @property
    def macro(self) -> MacroStage:
        return _MACRO[self]


_MACRO = {
    LifecycleStage.PROJECT_PLANNING: MacroStage.DESIGN,
    LifecycleStage.PROBLEM_FORMULATION: MacroStage.DESIGN,
    LifecycleStage.DATA_EXTRACTION_PROCUREMENT: MacroStage.DESIGN,
    LifecycleStage.DATA_ANALYSIS: MacroStage.DESIGN,
    LifecycleStage.PREPROCESSING_FEATURE_ENGINEERING: MacroStage.DEVELOPMENT,
    LifecycleStage.MODEL_SELECTION: MacroStage.DEVELOPMENT,
    LifecycleStage.MODEL_TRAINING: MacroStage.DEVELOPMENT,
    LifecycleStage.MODEL_VALIDATION_TESTING: MacroStage.DEVELOPMENT,
    LifecycleStage.MODEL_REPORTING: MacroStage.DEVELOPMENT,
    LifecycleStage.MODEL_PRODUCTIONALIZATION: MacroStage.DEPLOYMENT,
    LifecycleStage.USER_TRAINING: MacroStage.DEPLOYMENT,
    LifecycleStage.SYSTEM_USE_MONITORING: MacroStage.DEPLOYMENT,
    LifecycleStage.MODEL_UPDATING_DEPROVISIONING: MacroStage.DEPLOYMENT,
}


def stage_ids() -> list[str]:
    """All thirteen stage identifiers in canonical lifecycle order."""
    return [stage.value for stage in LifecycleStage]


def parse_stage(token: str) -> LifecycleStage | None:
    """Look up a stage by identifier, returning None for unknown tokens."""
    try:
        return LifecycleStage(token)
    except ValueError:
        return None
