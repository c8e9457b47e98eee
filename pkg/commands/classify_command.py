import settings
from bajra import catalog
from bajra.exceptions import SpecRejected
from bajra.invariance import classify_solution
from bajra.specfile import load_spec
from commands.reporting import add_output_flag, command


@command("classify")
def classify(args, document):
    if bool(args.spec) == bool(args.builtin):
        raise SpecRejected("arguments", "give exactly one of a spec file or --builtin NAME")
    if args.spec:
        spec = load_spec(args.spec)
        document.spec = spec.to_dict()
        mf, mg = spec.build()
        grid = args.grid or spec.grid
    else:
        document.spec = {"builtin": args.builtin}
        mf, mg = catalog.builtin_pair(args.builtin)
        grid = args.grid or 33

    document.tolerances = dict(settings.DEFAULT_TOLERANCES)
    verdict = classify_solution(mf, mg, grid, document.tolerances)
    document.residuals = verdict.residuals.to_dict()
    document.diagonal_checks = verdict.system.to_dict()
    document.details = verdict.to_dict()
    document.verdict = verdict.label
    document.passed = verdict.confirmed


def setup(subparsers):
    parser = subparsers.add_parser("classify", help="decide whether a pair of means is a solution family")
    parser.add_argument("spec", nargs="?", help="family spec JSON file")
    parser.add_argument("--builtin", metavar="NAME", help="builtin pair")
    parser.add_argument("--grid", type=int, help="sample points (default: the spec's grid)")
    add_output_flag(parser)
    parser.set_defaults(handler=classify)
