#!/usr/bin/env python3
"""
Catalog Commands for the CLI
"""
from typing import Any, Dict

from nsmoo.commands.base_command import BaseCommand
from nsmoo.core.config import RunConfig
from nsmoo.problems.problem_registry import problem_registry
from nsmoo.services.artifact_service import ArtifactService


class ProblemsListCommand(BaseCommand):
    """
    Lists the built-in test problems with their default parameters
    """

    needs_problem = False

    def __init__(self):
        super().__init__(name="problems", description="List the built-in test problems")

    def execute(self, cfg: RunConfig, artifacts: ArtifactService) -> Dict[str, Any]:
        return {"problems": problem_registry.describe()}
