"""로그 포맷터."""

from hetpcp.logging.formatter import HetLogFormatter, boot_log, run_log

__all__ = ["HetLogFormatter", "boot_log", "run_log"]
