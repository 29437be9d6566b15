"""
Command-line surface for the entprod library.

This package splits argument parsing, file I/O and output formatting into
small modules; ``commands`` wires them to the library.
"""

from .commands import (
    build_parser,
    cmd_decohere,
    cmd_gibbs2q,
    cmd_measure,
    cmd_spinor,
    cmd_states,
    main,
)

from .state_files import (
    StateFile,
    load_decoherence_spec,
    load_state_file,
)

from .parsing import (
    parse_number,
    parse_partition,
    parse_range,
)

__all__ = [
    # Commands
    'main',
    'build_parser',
    'cmd_measure',
    'cmd_states',
    'cmd_gibbs2q',
    'cmd_decohere',
    'cmd_spinor',

    # File I/O
    'StateFile',
    'load_state_file',
    'load_decoherence_spec',

    # Parsing
    'parse_number',
    'parse_partition',
    'parse_range',
]
