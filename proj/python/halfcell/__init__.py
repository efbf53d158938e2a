"""Python front end for the halfcell solver suite.

Thin wrapper over the compiled `_halfcell` module: run any CLI subcommand
in-process from a config string or file and get the result dict back.
"""

from ._halfcell import ConfigError, eval_expr, run, run_file

SUBCOMMANDS = (
    "lambda",
    "mu",
    "cell",
    "effective",
    "homogenize",
    "mc",
    "bavg",
    "audit",
)

__all__ = ["ConfigError", "eval_expr", "run", "run_file", "SUBCOMMANDS"]
