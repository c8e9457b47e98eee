import settings
from bajra import catalog
from bajra.diagonal import FD_STEPS, ORDER_TOLERANCES, compare_on_grid
from bajra.exceptions import SpecRejected
from bajra.invariance import diagonal_system_check
from bajra.specfile import load_spec
from commands.reporting import add_output_flag, command

DIAGONAL_GRID = 17


def _grid_summary(name, mean, args) -> tuple[dict, bool]:
    steps = {order: args.h for order in FD_STEPS} if args.h else None
    comparison = compare_on_grid(mean, args.grid, steps=steps)
    summary = {f"order{order}": comparison.max_discrepancy(order) for order in sorted(ORDER_TOLERANCES)}
    summary["points"] = len(comparison.results)
    summary["skipped"] = comparison.skipped
    return {name: summary}, comparison.passed


@command("verify-diagonal")
def verify_diagonal(args, document):
    if bool(args.spec) == bool(args.builtin):
        raise SpecRejected("arguments", "give exactly one of a spec file or --builtin NAME")
    document.tolerances = {f"order{k}": v for k, v in ORDER_TOLERANCES.items()}
    document.details["steps"] = {f"order{k}": args.h or v for k, v in FD_STEPS.items()}

    if args.spec:
        spec = load_spec(args.spec)
        document.spec = spec.to_dict()
        mf, mg = spec.build()
        means = {"f_side": mf, "g_side": mg}
    else:
        document.spec = {"builtin": args.builtin}
        if args.system:
            mf, mg = catalog.builtin_pair(args.builtin)
            means = {"f_side": mf, "g_side": mg}
        else:
            means = {"mean": catalog.builtin_mean(args.builtin)}

    passed = True
    for name, mean in means.items():
        summary, ok = _grid_summary(name, mean, args)
        document.diagonal_checks.update(summary)
        passed = passed and ok

    if args.system:
        tolerance = settings.DEFAULT_TOLERANCES["system"]
        document.tolerances["system"] = tolerance
        report = diagonal_system_check(mf, mg, args.grid)
        document.diagonal_checks["system"] = report.to_dict()
        passed = passed and report.passed(tolerance)

    document.passed = passed
    document.verdict = "PASS" if passed else "FAIL"


def setup(subparsers):
    parser = subparsers.add_parser("verify-diagonal", help="closed-form diagonal partials against finite differences")
    parser.add_argument("spec", nargs="?", help="family spec JSON file")
    parser.add_argument("--builtin", metavar="NAME", help="builtin mean (or pair with --system)")
    parser.add_argument("--system", action="store_true", help="also check the diagonal system of the pair")
    parser.add_argument("--h", type=float, help="one finite-difference step for all orders")
    parser.add_argument("--grid", type=int, default=DIAGONAL_GRID, help="diagonal points")
    add_output_flag(parser)
    parser.set_defaults(handler=verify_diagonal)
