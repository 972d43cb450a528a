"""Sensor-network calculus: parser, step engine and schedulers.

The heavy lifting lives in the compiled extension module; this package
re-exports its public surface.
"""

try:
    from ._csn import (  # noqa: F401
        Document,
        EngineError,
        EnergyError,
        ParseError,
        ScriptMismatch,
        congruent,
        explore,
        free_names,
        parse_network,
        parse_network_file,
        pretty_program,
        run,
    )
except ImportError:  # running against a build tree: the extension is top-level
    from _csn import (  # noqa: F401
        Document,
        EngineError,
        EnergyError,
        ParseError,
        ScriptMismatch,
        congruent,
        explore,
        free_names,
        parse_network,
        parse_network_file,
        pretty_program,
        run,
    )

__all__ = [
    "Document",
    "EngineError",
    "EnergyError",
    "ParseError",
    "ScriptMismatch",
    "congruent",
    "explore",
    "free_names",
    "parse_network",
    "parse_network_file",
    "pretty_program",
    "run",
]
