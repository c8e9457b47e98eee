import argparse
import importlib
import sys

import settings
from settings import logger


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bajra-verify",
        description="Construct and verify solutions of the invariance equation for Bajraktarevic means",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Loading commands
    for command_file in sorted(settings.COMMANDS_DIR.glob("*_command.py")):
        module_name = f"commands.{command_file.stem}"
        try:
            importlib.import_module(module_name).setup(subparsers)
            logger.debug(f"Loaded command: {command_file.name}")
        except Exception as e:
            logger.critical(f"Failed to load command {command_file.name}: {e}")
            if settings.LOG_LEVEL == "DEBUG":
                raise
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except KeyboardInterrupt:
        logger.warning("Interrupted, no report written")
        return 130


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
