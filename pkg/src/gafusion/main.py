import pathlib
import sys
from argparse import ArgumentParser, RawDescriptionHelpFormatter

from rich import print
from rich.markup import escape

from .exceptions import FormatError, ValidationFailure
from .generators import SyntheticSpec
from .logger import enable_logging
from .subcommands.bench import bench_subcommand
from .subcommands.gen import (gen_characterization_subcommand,
                              gen_deconvolution_subcommand,
                              gen_synthetic_subcommand, gen_texture_subcommand)
from .subcommands.solve import solve_subcommand, solver_config
from .subcommands.study import (DEFAULT_RHOS, DEFAULT_STRENGTHS,
                                characterize_subcommand, proposals_subcommand)

DESCRIPTION = """Minimize pairwise MRF energies with GA-fusion (fusion moves over graph-approximation proposals), alpha-expansion, ST-fusion and random-fusion, and generate the synthetic, deconvolution and texture problems they are benchmarked on."""

example_text = r"""Usage examples:

 gafusion gen synthetic --structure GRID8 --side 30 --lambda 1 --rate 0.5 --seed 3 --out 1-50-GRID8.mrf
 gafusion gen deconvolution --image clean.pgm --seed 0 --out deconv.mrf --noisy-out noisy.pgm
 gafusion -l INFO solve --algo ga --budget-s 10 --seed 7 --trace ga.csv 1-50-GRID8.mrf
 gafusion solve --profile ./profiles/synthetic.json --algo expansion 1-50-GRID8.mrf
 gafusion bench manifest.toml --out results
 gafusion study characterize --instances 100 --out characterization.csv
 """

ALGORITHMS = ["ga", "st", "random", "expansion", "expansion-trunc", "qpbo"]


def parse_args():
    seed_parser = ArgumentParser(add_help=False)
    seed_parser.add_argument("--seed", type=int, default=0, help="Seed of every random draw")

    ## Main parser
    parser = ArgumentParser(
        description=DESCRIPTION,
        formatter_class=RawDescriptionHelpFormatter,
        epilog=example_text,
    )

    parser.add_argument(
        "-l",
        "--log",
        dest="logLevel",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Set the logging level",
    )

    subparsers = parser.add_subparsers(dest="mode", title="mode", help="Mode to use")

    ## gen
    gen_parser = subparsers.add_parser("gen", help="Generate an instance file")
    generators = gen_parser.add_subparsers(dest="generator", title="generator", required=True)

    synthetic_parser = generators.add_parser(
        "synthetic", parents=[seed_parser], help="Multi-label test-bed instance, named lambda-rate-structure"
    )
    synthetic_parser.add_argument("--structure", choices=["GRID4", "GRID8", "GRID24", "FULL"], default="GRID4")
    synthetic_parser.add_argument("--side", type=int, default=30, help="Grid side, or node count for FULL")
    synthetic_parser.add_argument("--labels", type=int, default=5)
    synthetic_parser.add_argument("--lambda", dest="coupling", type=float, default=1.0)
    synthetic_parser.add_argument("--rate", type=float, default=0.0, help="Non-metric rate in [0, 1]")
    synthetic_parser.add_argument(
        "--stratified", action="store_true", default=False,
        help="Exactly round(rate * edges) non-metric terms",
    )
    synthetic_parser.add_argument("--out", type=pathlib.Path, default=None)

    characterization_parser = generators.add_parser(
        "characterization", parents=[seed_parser], help="Binary grid with a given unary strength"
    )
    characterization_parser.add_argument("--side", type=int, default=30)
    characterization_parser.add_argument("--strength", type=float, required=True)
    characterization_parser.add_argument("--out", type=pathlib.Path, required=True)

    deconvolution_parser = generators.add_parser(
        "deconvolution", parents=[seed_parser], help="Deconvolution of a three-gray-value PGM image"
    )
    deconvolution_parser.add_argument("--image", type=pathlib.Path, required=True)
    deconvolution_parser.add_argument("--kernel-sigma", type=float, default=3.0)
    deconvolution_parser.add_argument("--kernel-size", type=int, default=3)
    deconvolution_parser.add_argument("--noise-sigma", type=float, default=10.0)
    deconvolution_parser.add_argument("--smoothness", type=float, default=1.0)
    deconvolution_parser.add_argument("--out", type=pathlib.Path, required=True)
    deconvolution_parser.add_argument("--noisy-out", type=pathlib.Path, default=None)

    texture_parser = generators.add_parser(
        "texture", parents=[seed_parser], help="Binary texture restoration under salt & pepper noise"
    )
    texture_parser.add_argument("--image", type=pathlib.Path, required=True)
    texture_parser.add_argument("--threshold", type=int, default=128, help="Binarization threshold")
    texture_parser.add_argument("--fraction", type=float, default=0.7, help="Salt & pepper fraction")
    texture_parser.add_argument("-S", dest="S", type=int, default=3, help="Submodular offsets kept")
    texture_parser.add_argument("-N", dest="N", type=int, default=3, help="Non-submodular offsets kept")
    texture_parser.add_argument("--beta", type=float, default=5.0)
    texture_parser.add_argument("--window", type=int, default=35)
    texture_parser.add_argument("--out", type=pathlib.Path, required=True)
    texture_parser.add_argument("--noisy-out", type=pathlib.Path, default=None)

    ## solve
    solve_parser = subparsers.add_parser("solve", help="Minimize the energy of an instance file")
    solve_parser.add_argument("instance", type=pathlib.Path)
    solve_parser.add_argument("--algo", choices=ALGORITHMS, default=None)
    solve_parser.add_argument("--budget-s", dest="budget_s", type=float, default=None)
    solve_parser.add_argument("--iterations", type=int, default=None, help="Iteration cap")
    solve_parser.add_argument("--seed", type=int, default=None)
    solve_parser.add_argument("-K", dest="K", type=int, default=None, help="Expansion steps per GA proposal")
    solve_parser.add_argument("--rho", type=float, default=None, help="Fixed kept-edge fraction")
    solve_parser.add_argument("--window", type=int, default=None, help="Convergence window")
    solve_parser.add_argument("--init", choices=["zeros", "unary", "random"], default=None)
    solve_parser.add_argument("--initial-labels", type=pathlib.Path, default=None)
    solve_parser.add_argument(
        "--profile", type=pathlib.Path, default=None,
        help="JSON file of solver settings; explicit flags win",
    )
    solve_parser.add_argument("--trace", type=pathlib.Path, default=None, help="Trace CSV output")
    solve_parser.add_argument(
        "--no-timing", dest="timing", action="store_false", default=True,
        help="Leave wall_ms empty in the trace",
    )
    solve_parser.add_argument("--labels", type=pathlib.Path, default=None, help="Labeling output")
    solve_parser.add_argument(
        "--clean", type=pathlib.Path, default=None,
        help="Clean PGM image; its sorted gray values paint the labels and the error rate goes to stderr",
    )

    ## bench
    bench_parser = subparsers.add_parser("bench", help="Run an instances x algorithms x seeds matrix")
    bench_parser.add_argument("manifest", type=pathlib.Path)
    bench_parser.add_argument("--out", type=pathlib.Path, default=pathlib.Path("bench"))

    ## study
    study_parser = subparsers.add_parser("study", help="Proposal and approximation experiments")
    studies = study_parser.add_subparsers(dest="study", title="study", required=True)

    characterize_parser = studies.add_parser(
        "characterize", parents=[seed_parser], help="Labeling rate of QPBO against unary strength and rho"
    )
    characterize_parser.add_argument("--side", type=int, default=30)
    characterize_parser.add_argument("--strengths", type=float, nargs="+", default=DEFAULT_STRENGTHS)
    characterize_parser.add_argument("--rhos", type=float, nargs="+", default=DEFAULT_RHOS)
    characterize_parser.add_argument("--instances", type=int, default=100)
    characterize_parser.add_argument("--out", type=pathlib.Path, required=True)

    proposals_parser = studies.add_parser(
        "proposals", parents=[seed_parser], help="Energy of GA against ST proposals"
    )
    proposals_parser.add_argument("instance", type=pathlib.Path)
    proposals_parser.add_argument("--count", type=int, default=50)
    proposals_parser.add_argument("--out", type=pathlib.Path, required=True)

    return parser


def run(args):
    match args.mode:
        case "gen":
            match args.generator:
                case "synthetic":
                    spec = SyntheticSpec.build(
                        structure=args.structure,
                        side=args.side,
                        label_count=args.labels,
                        coupling=args.coupling,
                        non_metric_rate=args.rate,
                        seed=args.seed,
                        stratified=args.stratified,
                    )
                    gen_synthetic_subcommand(spec, args.out)

                case "characterization":
                    gen_characterization_subcommand(args.side, args.strength, args.seed, args.out)

                case "deconvolution":
                    gen_deconvolution_subcommand(
                        args.image, args.kernel_sigma, args.kernel_size, args.noise_sigma,
                        args.smoothness, args.seed, args.out, args.noisy_out,
                    )

                case "texture":
                    gen_texture_subcommand(
                        args.image, args.threshold, args.fraction, args.S, args.N,
                        args.beta, args.window, args.seed, args.out, args.noisy_out,
                    )

        case "solve":
            config = solver_config(
                args.profile,
                algorithm=args.algo,
                time_budget=args.budget_s,
                max_iterations=args.iterations,
                seed=args.seed,
                expansion_steps=args.K,
                fixed_rho=args.rho,
                convergence_window=args.window,
                initial=args.init,
            )
            solve_subcommand(
                args.instance, config, args.trace, args.labels, args.initial_labels, args.timing,
                args.clean,
            )

        case "bench":
            bench_subcommand(args.manifest, args.out)

        case "study":
            match args.study:
                case "characterize":
                    characterize_subcommand(
                        args.side, args.strengths, args.rhos, args.instances, args.seed, args.out
                    )

                case "proposals":
                    proposals_subcommand(args.instance, args.count, args.seed, args.out)


def main_cli(argv=None):
    parser = parse_args()
    args = parser.parse_args(argv)

    if args.mode is None:
        parser.print_help(sys.stderr)
        sys.exit(1)

    if args.logLevel:
        enable_logging(args.logLevel)

    try:
        run(args)

    except ValidationFailure as exc:
        print(f"[red]error:[/red] {escape(str(exc))}", file=sys.stderr)
        sys.exit(2)

    except (FormatError, OSError) as exc:
        print(f"[red]error:[/red] {escape(str(exc))}", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main_cli()
