#!/usr/bin/env python3
"""
Command Registry
Manages registration and dispatch of CLI commands
"""
import logging
from typing import Any, Dict, List, Optional

from nsmoo.commands.base_command import EXIT_CONFIG, BaseCommand
from nsmoo.commands.catalog_commands import ProblemsListCommand
from nsmoo.commands.solver_commands import (CoverCommand, InferCommand, PathCommand, ScalarizeCommand,
                                            SolveCommand)
from nsmoo.core.config import RunConfig
from nsmoo.services.artifact_service import ArtifactService

logger = logging.getLogger(__name__)


class CommandRegistry:
    """
    Registry for managing CLI commands
    """

    def __init__(self):
        self.commands: Dict[str, BaseCommand] = {}
        self._register_default_commands()

    def _register_default_commands(self):
        for command in [SolveCommand(), CoverCommand(), ScalarizeCommand(), PathCommand(),
                        InferCommand(), ProblemsListCommand()]:
            self.register_command(command)

    def register_command(self, command: BaseCommand) -> bool:
        if not isinstance(command, BaseCommand):
            logger.error(f"❌ Command must be instance of BaseCommand: {type(command)}")
            return False
        if command.name in self.commands:
            logger.warning(f"⚠️ Command {command.name} already registered, replacing...")
        self.commands[command.name] = command
        logger.debug(f"📝 Registered command: {command.name}")
        return True

    def get_command(self, name: str) -> Optional[BaseCommand]:
        return self.commands.get(name)

    def get_command_names(self) -> List[str]:
        return list(self.commands.keys())

    def execute_command(self, name: str, cfg: RunConfig,
                        artifacts: Optional[ArtifactService] = None) -> Dict[str, Any]:
        """
        Execute a command by name

        Returns:
            Command result dictionary (see BaseCommand.run)
        """
        command = self.get_command(name)
        if not command:
            return {
                "success": False,
                "exit_code": EXIT_CONFIG,
                "error": f"Command '{name}' not found",
                "available_commands": self.get_command_names(),
            }
        result = command.run(cfg, artifacts)
        logger.info(f"🔧 Executed command '{name}' - Success: {result['success']}")
        return result
