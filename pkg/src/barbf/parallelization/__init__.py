"""Replications of one run configuration across a worker pool."""

from barbf.parallelization.replicate import ReplicationResult, ReplicationRunner, replicate, replication_seed

__all__ = ["ReplicationResult", "ReplicationRunner", "replicate", "replication_seed"]
