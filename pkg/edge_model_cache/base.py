"""
Shared pydantic base model.

Provides the serialization and validation settings every configuration and
catalog type in the package inherits.
"""

from typing import ClassVar

from pydantic import BaseModel as PydanticBaseModel, ConfigDict


class BaseModel(PydanticBaseModel):
    """
    Base model for all configuration and catalog entities.

    Unknown keys are rejected and instances are immutable; use
    ``model_copy(update=...)`` to derive a changed copy.
    """
    model_config: ClassVar[ConfigDict] = ConfigDict(extra="forbid", frozen=True)
