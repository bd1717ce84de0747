"""Python bindings for the mgen mutation-guided test generator."""

from ._core import (
    MgenError,
    extract_braced_token,
    extract_fenced_code,
    parse_mutant,
    percent_half_up,
    placeholders,
    render,
    round_half_up,
    run_cli,
    score,
    strip_comments,
    summarize,
    summary_table,
)

__all__ = [
    "MgenError",
    "extract_braced_token",
    "extract_fenced_code",
    "parse_mutant",
    "percent_half_up",
    "placeholders",
    "render",
    "round_half_up",
    "run_cli",
    "score",
    "strip_comments",
    "summarize",
    "summary_table",
]
