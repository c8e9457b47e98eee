import functools
import time

from bajra.exceptions import BajraError
from bajra.reports import ReportDocument
from settings import logger


def add_output_flag(parser):
    parser.add_argument("--out", metavar="PATH", help="also write the JSON report to PATH")


def command(name: str):
    """Wrap a handler(args, document) into an exit-code returning CLI action.

    The handler fills the document in place. Library errors end the run
    with their class's exit code; the report is printed either way.
    """
    def decorator(handler):
        @functools.wraps(handler)
        def run(args) -> int:
            logger.info(f"Command {name} invoked")
            document = ReportDocument(command=name, spec={}, tolerances={})
            started = time.perf_counter()
            try:
                handler(args, document)
                exit_code = 0 if document.passed else 1
            except BajraError as e:
                logger.error(f"{type(e).__name__}: {e}")
                document.passed = False
                document.verdict = type(e).__name__
                document.error = f"{type(e).__name__}: {e}"
                exit_code = e.exit_code
            document.wall_time = time.perf_counter() - started
            print(document.dumps())
            if args.out:
                document.write(args.out)
            logger.info(f"Command {name} finished: {document.verdict} (exit {exit_code})")
            return exit_code
        return run
    return decorator
