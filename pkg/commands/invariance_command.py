import settings
from bajra.invariance import ResidualReport, residual_grid
from bajra.reports import write_residual_csv
from bajra.specfile import load_spec
from commands.reporting import add_output_flag, command


@command("verify-invariance")
def verify_invariance(args, document):
    spec = load_spec(args.spec)
    document.spec = spec.to_dict()
    document.tolerances = {"invariance": args.tol}
    mf, mg = spec.build()
    X, Y, R = residual_grid(mf, mg, args.grid or spec.grid)
    if args.csv:
        write_residual_csv(args.csv, X, Y, R)
    report = ResidualReport(grid_size=R.size, max_invariance=float(R.max()))
    document.residuals = report.to_dict()
    document.passed = report.passed({"invariance": args.tol})
    document.verdict = "PASS" if document.passed else "FAIL"


def setup(subparsers):
    parser = subparsers.add_parser("verify-invariance", help="max |A_fp + A_gq - x - y| over a grid")
    parser.add_argument("spec", help="family spec JSON file")
    parser.add_argument("--grid", type=int, help="points per axis (default: the spec's grid)")
    parser.add_argument("--tol", type=float, default=settings.DEFAULT_TOLERANCES["invariance"])
    parser.add_argument("--csv", metavar="PATH", help="write per-point residuals as CSV")
    add_output_flag(parser)
    parser.set_defaults(handler=verify_invariance)
