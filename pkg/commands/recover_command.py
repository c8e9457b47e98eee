from bajra import builtins
from bajra.functions import Interval
from bajra.invariance import RECONSTRUCTION_TOLERANCE, recover_uv
from commands.reporting import add_output_flag, command


@command("recover")
def recover(args, document):
    domain = Interval(*args.domain)
    f = builtins.make_function(args.builtin, args.params, domain)
    document.spec = {"builtin": args.builtin, "params": args.params, "x0": args.x0, "domain": domain.to_list()}
    document.tolerances = {"reconstruction": RECONSTRUCTION_TOLERANCE}
    pair = recover_uv(f, args.x0)
    document.details = {
        "gamma": pair.gamma,
        "u": [pair.u.a, pair.u.b],
        "v": [pair.v.a, pair.v.b],
        "support": pair.support.to_list(),
    }
    document.residuals = {"reconstruction": pair.residual}
    document.passed = pair.residual <= RECONSTRUCTION_TOLERANCE
    document.verdict = f"gamma={pair.gamma:.10g}" if document.passed else "FAIL"


def setup(subparsers):
    parser = subparsers.add_parser("recover", help="gamma and (u, v) with f = u/v for a builtin f")
    parser.add_argument("--builtin", required=True, metavar="NAME")
    parser.add_argument("--params", type=float, nargs="*", default=[], help="builtin parameters, e.g. mobius a b c d")
    parser.add_argument("--x0", type=float, required=True)
    parser.add_argument("--domain", type=float, nargs=2, required=True, metavar=("LO", "HI"))
    add_output_flag(parser)
    parser.set_defaults(handler=recover)
