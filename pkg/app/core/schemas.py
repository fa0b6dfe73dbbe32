"""
Core schemas for common response patterns.

This module provides reusable Pydantic schemas used across the engine
for standardized structures such as error responses.
"""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field


class ErrorResponse(BaseModel):
    """
    Error document emitted by the command-line surface.

    **Example:**
    ```json
    {
      "message": "Data set document is malformed",
      "error_code": "dataset_parse_error",
      "detail": {"line": 4, "column": 2, "reason": "Category \"weather\" has no value \"Foggy\""},
      "exit_code": 1
    }
    ```
    """

    model_config = ConfigDict(frozen=True)

    message: str
    error_code: str
    detail: dict[str, Any] = Field(default_factory=dict)
    exit_code: int = 1
