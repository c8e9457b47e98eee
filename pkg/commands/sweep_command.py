import settings
from settings import logger
from bajra.invariance import construct_family, invariance_residual, necessary_residuals
from bajra.sampling import GAMMA_VALUES, make_rng, random_family_spec
from commands.reporting import add_output_flag, command


@command("sweep")
def sweep(args, document):
    seed = settings.SEED if args.seed is None else args.seed
    rng = make_rng(seed)
    document.spec = {"seed": seed, "draws": args.draws, "grid": args.grid, "gammas": list(GAMMA_VALUES)}
    document.tolerances = dict(settings.DEFAULT_TOLERANCES)

    worst = {}
    failures = []
    for gamma in GAMMA_VALUES:
        for draw in range(args.draws):
            spec = random_family_spec(rng, gamma, grid=args.grid)
            mf, mg = construct_family(spec.to_family())
            report = invariance_residual(mf, mg, args.grid).merged(necessary_residuals(mf, mg, args.grid))
            for key in ("max_invariance", "cond1", "cond2", "cond3", "cond4", "delta_spread"):
                worst[key] = max(worst.get(key, 0.0), getattr(report, key))
            failed = report.failures(document.tolerances)
            if failed:
                failures.append({"gamma": gamma, "draw": draw, "failed": failed, "spec": spec.to_dict()})
        logger.info(f"Sweep gamma={gamma:g}: {args.draws} draws done")

    document.residuals = worst
    document.details = {"families": len(GAMMA_VALUES) * args.draws, "failures": failures}
    document.passed = not failures
    document.verdict = "PASS" if document.passed else f"FAIL ({len(failures)} families)"


def setup(subparsers):
    parser = subparsers.add_parser("sweep", help="randomized families over a gamma grid")
    parser.add_argument("--draws", type=int, default=20, help="families per gamma")
    parser.add_argument("--grid", type=int, default=33)
    parser.add_argument("--seed", type=int, help="overrides BAJRA_SEED")
    add_output_flag(parser)
    parser.set_defaults(handler=sweep)
