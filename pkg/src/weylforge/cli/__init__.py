"""Command line interface: expression parser, printer and the ``weylforge`` command."""


def main(argv=None) -> int:
    # Imported lazily: the library modules use the parser, and main imports them.
    from .main import main as _main

    return _main(argv)


__all__ = ["main"]
