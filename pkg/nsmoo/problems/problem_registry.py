#!/usr/bin/env python3
"""
Problem Registry
Manages registration and lookup of catalog problems for the CLI
"""
import logging
from typing import Any, Dict, List, Optional

from nsmoo.core.errors import ConfigError, PreconditionError
from nsmoo.core.problem import MopProblem
from nsmoo.problems.catalog import CATALOG, ProblemCatalogEntry

logger = logging.getLogger(__name__)


class ProblemRegistry:
    """
    Registry for managing test problems
    """

    def __init__(self):
        self.entries: Dict[str, ProblemCatalogEntry] = {}
        self._register_default_problems()

    def _register_default_problems(self):
        for entry in CATALOG:
            self.register(entry)

    def register(self, entry: ProblemCatalogEntry) -> None:
        if entry.name in self.entries:
            logger.warning(f"⚠️ Problem {entry.name} already registered, replacing...")
        self.entries[entry.name] = entry
        logger.debug(f"📝 Registered problem: {entry.name}")

    def get(self, name: str) -> Optional[ProblemCatalogEntry]:
        return self.entries.get(name)

    def names(self) -> List[str]:
        return list(self.entries.keys())

    def build(self, name: str, params: Optional[Dict[str, Any]] = None) -> MopProblem:
        """
        Instantiate a registered problem

        Raises:
            ConfigError: unknown name or rejected parameters
        """
        entry = self.get(name)
        if entry is None:
            raise ConfigError(f"unknown problem '{name}', available: {', '.join(self.names())}")
        try:
            return entry.build(params)
        except (TypeError, ValueError, PreconditionError) as e:
            raise ConfigError(f"problem '{name}': {e}") from e

    def describe(self) -> List[Dict[str, Any]]:
        """Name, description and default parameters of every problem"""
        return [{"name": e.name, "description": e.description, "defaults": e.defaults,
                 "known_solution": e.known_solution is not None}
                for e in self.entries.values()]


problem_registry = ProblemRegistry()
