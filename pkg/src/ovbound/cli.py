import argparse
import logging
import math
import sys

import ovbound.exception as exception
import ovbound.util as util
import ovbound.core as core
import ovbound.bounds as bounds
import ovbound.analytic_engine as analytic_engine
import ovbound.extremal as extremal
import ovbound.two_value as two_value
import ovbound.report as report

logger = logging.getLogger(__name__)

EXIT_VALIDATION = 2
EXIT_PRECONDITION = 3
EXIT_INTERNAL = 4

# Exit code per exception class, most specific first
exit_codes = [
    (exception.ValidationException, EXIT_VALIDATION),
    (exception.PreconditionException, EXIT_PRECONDITION),
    (exception.PoleException, EXIT_INTERNAL),
    (exception.BranchContinuationException, EXIT_INTERNAL),
    (exception.OVBInternalException, EXIT_INTERNAL)
]

def exit_code_for(ex):
    for extype, code in exit_codes:
        if isinstance(ex, extype):
            return code

    return EXIT_INTERNAL

def _plan(args):
    if args.plan is None:
        return core.DEFAULT_PLAN

    radii_count, angles_count, r_max = util.parse_plan(args.plan)

    return core.DiscSamplingPlan(radii_count=radii_count, angles_count=angles_count, r_max=r_max)

def _plan_parameters(plan):
    return {"radii": plan.radii_count, "angles": plan.angles_count, "r_max": plan.r_max}

def _emit(text, out=None):
    if out is None:
        sys.stdout.write(text)
        return

    with open(out, "w", encoding="utf-8", newline="") as file:
        file.write(text)

    logger.debug(f"Wrote {out}")

def cmd_bound(args):
    exceptional_set = bounds.ExceptionalSet(util.parse_real_list(args.alphas, "alpha"))
    result = bounds.bound_k(exceptional_set)

    parameters = {"alphas": list(exceptional_set.alphas)}
    _emit(report.render("bound", result.to_dict(), "bound", parameters, args.format))

def cmd_extremal(args):
    alpha = util.parse_real(args.alpha, "alpha")
    c_arg = util.parse_real(args.c_arg, "c-arg")
    plan = _plan(args)

    spec = extremal.ExtremalSpec(alpha, core.UnimodularConstant.from_degrees(c_arg))
    analytic_map = extremal.extremal_map(spec)
    exceptional_set = analytic_map.declared_set()

    derivative = analytic_engine.derivative_at_zero(analytic_map)

    verification = None
    if args.verify:
        verification = analytic_engine.verify_bound(analytic_map, exceptional_set, plan)
        samples = verification
    else:
        samples = analytic_engine.sample_hypotheses(analytic_map, exceptional_set, plan)

    result = {
        "alpha": spec.alpha,
        "c": spec.c.value,
        "c_arg_degrees": spec.c.degrees,
        "derivative": derivative.to_dict(),
        "closed_form": extremal.extremal_derivative_closed_form(spec),
        "bound_k1": bounds.bound_k1(spec.alpha),
        "omitted_min_distance": samples.omitted_min_distance,
        "self_map_margin": samples.self_map_margin,
        "verification": None if verification is None else verification.to_dict()
    }

    parameters = {"alpha": alpha, "c_arg": c_arg, "verify": args.verify, "plan": _plan_parameters(plan)}
    _emit(report.render("extremal", result, "extremal", parameters, args.format))

def cmd_feasibility(args):
    a1 = util.parse_real(args.a1, "a1")
    a2 = util.parse_real(args.a2, "a2")

    result = two_value.feasibility_check(a1, a2, args.t_samples)

    parameters = {"a1": a1, "a2": a2, "t_samples": args.t_samples}
    _emit(report.render("feasibility", result.to_dict(), "two-value feasibility", parameters, args.format))

def cmd_scan(args):
    scan = two_value.region_scan(args.resolution, args.t_samples, workers=args.workers)

    rows = [cell.to_row() for cell in scan.cells]
    _emit(report.render_csv("scan", rows), args.out)

    summary = scan.to_dict()
    if args.out is not None:
        parameters = {"resolution": args.resolution, "t_samples": args.t_samples, "out": args.out}
        _emit(report.render("scan_summary", summary, "two-value scan", parameters, args.format))
    else:
        counts = summary["counts"]
        print(f"summary: cells={summary['cells']} feasible={counts['feasible']} "
            f"infeasible={counts['infeasible']} inconclusive={counts['inconclusive']}", file=sys.stderr)

    if args.findings is not None:
        counterexample = two_value.feasibility_check(0.5, 0.25, args.t_samples)
        _emit(report.render_findings(scan, counterexample, two_value.beta_threshold()), args.findings)

def cmd_sharpness(args):
    a1 = util.parse_real(args.a1, "a1")
    a2 = util.parse_real(args.a2, "a2")
    c_arg = util.parse_real(args.c_arg, "c-arg")
    plan = _plan(args)

    spec = two_value.TwoValueSpec(a1, a2, core.UnimodularConstant.from_degrees(c_arg))
    result = two_value.sharpness_verify(spec, plan, force=args.force)

    parameters = {"a1": a1, "a2": a2, "c_arg": c_arg, "force": args.force, "plan": _plan_parameters(plan)}
    _emit(report.render("verification", result.to_dict(), "two-value sharpness", parameters, args.format))

def cmd_beta(args):
    beta = None if args.value is None else util.parse_real(args.value, "beta")

    result = {
        "beta": beta,
        "condition": None if beta is None else two_value.beta_condition(beta),
        "threshold": two_value.beta_threshold(),
        "closed_form_threshold": math.sqrt(math.sqrt(2.0) - 1.0)
    }

    _emit(report.render("beta", result, "beta", {"value": beta}, args.format))

def build_parser():
    parser = argparse.ArgumentParser(
        prog="ovbound", description="Derivative bounds for disc self-maps omitting values"
    )

    parser.add_argument(
        "-d", action="store_true", dest="debug", help="Enable debug output"
    )

    parser.add_argument("--format", choices=["json", "csv"], default="json", help="Report format")
    parser.add_argument("--plan", default=None, help="Sampling plan as RADII,ANGLES,RMAX")

    commands = parser.add_subparsers(dest="command", required=True)

    # bound
    sub = commands.add_parser("bound", help="Bound on |f'(0)| for a set of omitted values")
    sub.add_argument("--alphas", required=True, help="Comma separated omitted values in (0, 1)")
    sub.set_defaults(handler=cmd_bound)

    # extremal
    sub = commands.add_parser("extremal", help="Single omitted value extremal map")
    sub.add_argument("--alpha", required=True, help="Omitted value in (0, 1)")
    sub.add_argument("--c-arg", default="0", dest="c_arg", help="Argument of the rotation constant, in degrees")
    sub.add_argument("--verify", action="store_true", help="Run the full verification")
    sub.set_defaults(handler=cmd_extremal)

    # two-value
    sub = commands.add_parser("two-value", help="Two omitted values")
    two_value_commands = sub.add_subparsers(dest="two_value_command", required=True)

    sub = two_value_commands.add_parser("feasibility", help="Root modulus feasibility check for a pair")
    sub.add_argument("--a1", required=True)
    sub.add_argument("--a2", required=True)
    sub.add_argument("--t-samples", type=int, default=two_value.DEFAULT_T_SAMPLES, dest="t_samples")
    sub.set_defaults(handler=cmd_feasibility)

    sub = two_value_commands.add_parser("scan", help="Feasibility over a grid of pairs")
    sub.add_argument("--resolution", type=int, required=True)
    sub.add_argument("--t-samples", type=int, default=two_value.DEFAULT_T_SAMPLES, dest="t_samples")
    sub.add_argument("--out", default=None, help="Csv output file")
    sub.add_argument("--findings", default=None, help="Markdown findings output file")
    sub.add_argument("--workers", type=int, default=1)
    sub.set_defaults(handler=cmd_scan)

    sub = two_value_commands.add_parser("sharpness", help="Verify the candidate extremal map for a pair")
    sub.add_argument("--a1", required=True)
    sub.add_argument("--a2", required=True)
    sub.add_argument("--c-arg", default="0", dest="c_arg")
    sub.add_argument("--force", action="store_true", help="Build the candidate despite the feasibility verdict")
    sub.set_defaults(handler=cmd_sharpness)

    # beta
    sub = commands.add_parser("beta", help="Beta condition and its threshold")
    sub.add_argument("--value", default=None)
    sub.set_defaults(handler=cmd_beta)

    return parser

def main(argv=None):
    """
    Processes ovbound command line arguments and runs the requested computation
    """
    parser = build_parser()
    args = parser.parse_args(argv)

    # Capture argument options
    debug = args.debug

    # Logging configuration
    level = logging.WARNING
    if debug:
        level = logging.DEBUG

    logging.basicConfig(level=level, format="%(levelname)s: %(message)s")

    try:
        args.handler(args)

    except BrokenPipeError as e:
        try:
            print("Broken Pipe", file=sys.stderr)
            if not sys.stderr.closed:
                sys.stderr.close()
        except:
            pass

        sys.exit(1)

    except Exception as e:  # pylint: disable=broad-exception-caught
        if debug:
            logger.error(e, exc_info=True, stack_info=True)
        else:
            logger.error(e)

        sys.exit(exit_code_for(e))

    try:
        sys.stdout.flush()
    except Exception as e:
        sys.exit(1)

    sys.exit(0)
