# Cluster Engine Configuration File
# Centralized configuration for enumeration limits, worker pools and audits

import logging
import os
from dataclasses import dataclass

logger = logging.getLogger(__name__)

# Every finite-type rank <= 4 exchange graph completes well inside these bounds.
DEFAULT_MAX_NODES = 10000
DEFAULT_MAX_DEPTH = 64


@dataclass(frozen=True)
class ExplorationLimits:
    """Bounds for exchange-graph and mutation-class enumeration"""
    max_nodes: int = DEFAULT_MAX_NODES
    max_depth: int = DEFAULT_MAX_DEPTH

    def __post_init__(self):
        if self.max_nodes < 1:
            raise ValueError(f"max_nodes must be at least 1, got {self.max_nodes}")
        if self.max_depth < 0:
            raise ValueError(f"max_depth must be non-negative, got {self.max_depth}")


@dataclass
class WorkerSettings:
    """Worker pool size. 1 is the single-threaded reference mode."""
    jobs: int = 1


@dataclass
class AuditSettings:
    """Audit strictness and diagnostics"""
    audit_mode: bool = False   # positivity check on every new seed during explore
    deep_checks: bool = True   # depth-2 commutation spot checks in the theorem audit
    progress: bool = False     # tqdm bars on stderr


@dataclass
class AutomorphismSettings:
    """Candidate search for cluster automorphisms"""
    # Above this rank only magnitude-compatible bijections are tried (n! grows fast).
    prune_above_rank: int = 4


@dataclass
class LoggingSettings:
    level: str = "WARNING"


def _env_flag(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() in ("1", "true", "yes", "on")


class EngineConfig:
    """Main engine configuration class"""

    def __init__(self):
        self.limits = ExplorationLimits()
        self.workers = WorkerSettings()
        self.audit = AuditSettings()
        self.automorphisms = AutomorphismSettings()
        self.logging = LoggingSettings()

        # Load environment overrides
        self._load_env_overrides()

    def _load_env_overrides(self):
        """Load configuration overrides from environment variables.

        Only parallelism, diagnostics and audit strictness are tunable here;
        enumeration limits come from defaults and CLI flags so that results
        never depend on the environment.
        """
        try:
            self.workers.jobs = max(1, int(os.getenv("CLUSTER_JOBS", str(self.workers.jobs))))
        except ValueError:
            logger.warning("[CONFIG] Ignoring malformed CLUSTER_JOBS=%r", os.getenv("CLUSTER_JOBS"))

        self.audit.audit_mode = _env_flag("CLUSTER_AUDIT_MODE", self.audit.audit_mode)
        self.audit.deep_checks = _env_flag("CLUSTER_DEEP_CHECKS", self.audit.deep_checks)
        self.audit.progress = _env_flag("CLUSTER_PROGRESS", self.audit.progress)

        try:
            self.automorphisms.prune_above_rank = int(
                os.getenv("CLUSTER_PRUNE_ABOVE_RANK", str(self.automorphisms.prune_above_rank))
            )
        except ValueError:
            logger.warning(
                "[CONFIG] Ignoring malformed CLUSTER_PRUNE_ABOVE_RANK=%r",
                os.getenv("CLUSTER_PRUNE_ABOVE_RANK"),
            )

        level = os.getenv("CLUSTER_LOG_LEVEL", self.logging.level).upper()
        if level in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            self.logging.level = level
        else:
            logger.warning("[CONFIG] Ignoring unknown CLUSTER_LOG_LEVEL=%r", level)

    def resolve_jobs(self, jobs=None) -> int:
        """Explicit job count if given, else the configured one"""
        return max(1, int(jobs)) if jobs is not None else self.workers.jobs

    def should_prune(self, rank: int, prune=None) -> bool:
        """Whether candidate bijections are pruned by entry magnitudes"""
        if prune is not None:
            return bool(prune)
        return rank > self.automorphisms.prune_above_rank


# Global configuration instance
config = EngineConfig()


def get_config() -> EngineConfig:
    """Get the global engine configuration"""
    return config


def reload_config():
    """Reload configuration (useful after changing the environment)"""
    global config
    config = EngineConfig()
    return config
