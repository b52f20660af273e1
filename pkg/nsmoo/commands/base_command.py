#!/usr/bin/env python3
"""
Base Command Class for the CLI
Provides timing, error-to-exit-code mapping and a standard result dictionary
"""
import logging
from abc import ABC, abstractmethod
from datetime import datetime
from typing import Any, Dict, Optional

from nsmoo.core.config import RunConfig
from nsmoo.core.errors import ConfigError, NsmooError, PreconditionError
from nsmoo.services.artifact_service import ArtifactService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_BUDGET = 2
EXIT_FAILURE = 3


class BaseCommand(ABC):
    """
    Abstract base class for all CLI commands
    """

    needs_problem = True

    def __init__(self, name: str, description: str):
        self.name = name
        self.description = description

    @abstractmethod
    def execute(self, cfg: RunConfig, artifacts: ArtifactService) -> Dict[str, Any]:
        """
        Execute the command

        Returns:
            Dictionary with the command's summary; an "exit_code" entry
            overrides the default success code
        """

    def run(self, cfg: RunConfig, artifacts: Optional[ArtifactService] = None) -> Dict[str, Any]:
        """
        Run the command with error handling and logging

        Returns:
            Standardized command result
        """
        start_time = datetime.now()
        artifacts = artifacts or ArtifactService(cfg.resolved_output_dir())
        try:
            if self.needs_problem:
                cfg.require_problem()
            data = self.execute(cfg, artifacts)
            exit_code = int(data.pop("exit_code", EXIT_OK))
            error = data.pop("error", None)
        except (ConfigError, PreconditionError) as e:
            exit_code, data, error = EXIT_CONFIG, {}, str(e)
        except NsmooError as e:
            exit_code, data, error = EXIT_FAILURE, {}, str(e)

        execution_time = (datetime.now() - start_time).total_seconds() * 1000
        if exit_code == EXIT_OK:
            logger.info(f"✅ {self.name} finished in {execution_time:.0f} ms")
        else:
            logger.error(f"❌ {self.name} failed (exit {exit_code}): {error}")
        return {
            "success": exit_code == EXIT_OK,
            "command": self.name,
            "exit_code": exit_code,
            "error": error,
            "data": data,
            "artifacts": [str(p) for p in artifacts.written],
            "execution_time_ms": execution_time,
        }
