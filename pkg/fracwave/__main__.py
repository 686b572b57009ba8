"""fracwave.

Main entry point for running fracwave from the command line.
"""

import sys

from fracwave.cli_io import parse_and_dispatch


def main() -> None:
    """Entry point to fracwave.

    Notes
    -----
    Use `if __name__ == '__main__':`, even though __main__.py is a valid
    entry point without it, so that argparse code does not interfere with pytest.
    """
    sys.exit(parse_and_dispatch(sys.argv[1:]))


if __name__ == '__main__':
    main()  # pragma: no cover
