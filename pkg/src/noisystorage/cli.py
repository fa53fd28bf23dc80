"""Command-line front end: bound calculators, tables, simulations, checks.

Exit codes: 0 success, 1 invalid parameters, 2 infeasible bound (the
storage carries too much information, or no positive string length
remains), 3 internal numeric failure or a failed verification suite.
Round counts accept scientific notation (``--n 1e10``); bound commands
are formula-only, simulation commands run at desk scale.
"""

import argparse
import json
import sys

import numpy as np

from .bounds import (
    FEASIBLE_REGION_HEADER,
    RATE_CURVE_HEADER,
    InfeasibleStorageError,
    NoPositiveLengthError,
    OptimizationError,
    OtParams,
    PreconditionError,
    QidParams,
    RobustParams,
    StorageModel,
    depolarizing_capacity,
    dishonest_alice_error,
    feasible_region,
    format_value,
    impersonation_error,
    ot_epsilon,
    ot_length,
    qid_error,
    rate_curve,
    robust_ot_length,
    rows_to_csv,
    strong_converse_exponent,
)
from .checks import SUITES
from .codes import qid_code, repetition_code
from .protocols import run_qid, run_robust_rot, run_rot


class CliParameterError(ValueError):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliParameterError(message)


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _kv_text(pairs):
    return "".join("%s = %s\n" % (k, format_value(v)) for k, v in pairs)


def _report(pairs, fmt, out_path):
    if fmt == "json":
        _emit(json.dumps(dict(pairs), indent=2) + "\n", out_path)
    else:
        _emit(_kv_text(pairs), out_path)


def _storage(args):
    return StorageModel(r=args.r, nu=args.nu, dim=args.dim)


def _add_storage_args(p):
    p.add_argument("--r", type=float, required=True,
                   help="storage retention in [0, 1]")
    p.add_argument("--nu", type=float, default=1.0, help="storage rate")
    p.add_argument("--dim", type=int, default=2, help="channel dimension")


def _add_output_args(p, default_fmt="text", choices=("text", "json")):
    p.add_argument("--format", choices=choices, default=default_fmt)
    p.add_argument("--out", default=None, help="output file (default stdout)")


def build_parser():
    parser = Parser(prog="noisystorage", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    bounds = sub.add_parser("bounds", help="security-bound calculators")
    bsub = bounds.add_subparsers(dest="bound", required=True)

    b_ot = bsub.add_parser("ot", help="plain oblivious-transfer length")
    b_ot.add_argument("--n", type=float, required=True)
    b_ot.add_argument("--delta", type=float, required=True)
    b_ot.add_argument("--threshold", type=float, default=None,
                      help="acceptable error; compared against eps (the "
                           "2*eps statement verdict is shown alongside)")
    _add_storage_args(b_ot)
    _add_output_args(b_ot)

    b_rob = bsub.add_parser("robust", help="lossy/noisy oblivious transfer")
    b_rob.add_argument("--n", type=float, required=True)
    b_rob.add_argument("--delta", type=float, required=True)
    b_rob.add_argument("--threshold", type=float, default=None,
                       help="acceptable error; compared against eps")
    b_rob.add_argument("--p1-sent", type=float, required=True)
    b_rob.add_argument("--ph-noclick", type=float, required=True)
    b_rob.add_argument("--pd-noclick", type=float, required=True)
    b_rob.add_argument("--ph-err", type=float, required=True)
    b_rob.add_argument("--ec-variant", choices=("rounds", "error-complement"),
                       default="rounds")
    _add_storage_args(b_rob)
    _add_output_args(b_rob)

    b_qid = bsub.add_parser("qid", help="identification error")
    b_qid.add_argument("--n", type=float, required=True)
    b_qid.add_argument("--m", type=int, required=True)
    b_qid.add_argument("--delta", type=float, required=True)
    b_qid.add_argument("--ell", type=int, required=True)
    b_qid.add_argument("--d-code", type=int, default=None)
    _add_storage_args(b_qid)
    _add_output_args(b_qid)

    b_imp = bsub.add_parser("impersonation",
                            help="two-sided identification error")
    b_imp.add_argument("--n", type=float, required=True)
    b_imp.add_argument("--m", type=int, required=True)
    b_imp.add_argument("--delta", type=float, required=True)
    _add_storage_args(b_imp)
    _add_output_args(b_imp)

    curve = sub.add_parser("curve", help="transfer rate over a retention grid")
    curve.add_argument("--n", type=float, required=True)
    curve.add_argument("--delta", type=float, required=True)
    curve.add_argument("--nu", type=float, default=1.0)
    curve.add_argument("--dim", type=int, default=2)
    curve.add_argument("--r-min", type=float, default=0.0)
    curve.add_argument("--r-max", type=float, default=0.9)
    curve.add_argument("--steps", type=int, default=200)
    _add_output_args(curve, default_fmt="csv", choices=("csv", "json"))

    region = sub.add_parser("region", help="feasible (r, nu) region table")
    region.add_argument("--steps", type=int, default=100)
    region.add_argument("--r-steps", type=int, default=None)
    region.add_argument("--nu-steps", type=int, default=None)
    region.add_argument("--r-max", type=float, default=1.0)
    region.add_argument("--nu-max", type=float, default=1.0)
    region.add_argument("--dim", type=int, default=2)
    _add_output_args(region, default_fmt="csv", choices=("csv", "json"))

    sim = sub.add_parser("simulate", help="desk-scale protocol runs")
    ssub = sim.add_subparsers(dest="protocol", required=True)

    s_rot = ssub.add_parser("rot", help="randomized oblivious transfer")
    s_rot.add_argument("--n", type=int, default=16)
    s_rot.add_argument("--ell", type=int, default=4)
    s_rot.add_argument("--choice", type=int, choices=(0, 1), default=0)
    s_rot.add_argument("--trials", type=int, default=100)
    s_rot.add_argument("--seed", type=int, default=0)
    _add_output_args(s_rot, default_fmt="json", choices=("json",))

    s_rob = ssub.add_parser("robust", help="robust oblivious transfer")
    s_rob.add_argument("--n", type=int, default=512)
    s_rob.add_argument("--ell", type=int, default=8)
    s_rob.add_argument("--choice", type=int, choices=(0, 1), default=0)
    s_rob.add_argument("--delta", type=float, default=0.02)
    s_rob.add_argument("--p1-sent", type=float, default=1.0)
    s_rob.add_argument("--ph-noclick", type=float, default=0.1)
    s_rob.add_argument("--pd-noclick", type=float, default=0.0)
    s_rob.add_argument("--ph-err", type=float, default=0.01)
    s_rob.add_argument("--eps-target", type=float, default=1e-3)
    s_rob.add_argument("--code-block", type=int, default=3,
                       help="repetition block length for error correction")
    s_rob.add_argument("--r", type=float, default=0.2)
    s_rob.add_argument("--nu", type=float, default=1.0)
    s_rob.add_argument("--trials", type=int, default=100)
    s_rob.add_argument("--seed", type=int, default=0)
    _add_output_args(s_rob, default_fmt="json", choices=("json",))

    s_qid = ssub.add_parser("qid", help="password identification")
    s_qid.add_argument("--m", type=int, default=16)
    s_qid.add_argument("--code-n", type=int, default=8)
    s_qid.add_argument("--ell", type=int, default=8)
    s_qid.add_argument("--w-alice", type=int, default=1)
    s_qid.add_argument("--w-bob", type=int, default=1)
    s_qid.add_argument("--trials", type=int, default=100)
    s_qid.add_argument("--seed", type=int, default=0)
    _add_output_args(s_qid, default_fmt="json", choices=("json",))

    verify = sub.add_parser("verify", help="randomized verification suites")
    verify.add_argument("suite", choices=sorted(SUITES))
    verify.add_argument("--trials", type=int, default=None)
    verify.add_argument("--seed", type=int, default=7)

    return parser


def _threshold_pairs(args, eps):
    if args.threshold is None:
        return []
    return [("threshold", args.threshold),
            ("eps_within_threshold", eps <= args.threshold),
            ("two_eps_within_threshold", 2.0 * eps <= args.threshold)]


def _cmd_bounds(args):
    storage = _storage(args)
    if args.bound == "ot":
        params = OtParams(n=args.n, delta=args.delta, storage=storage)
        gamma = strong_converse_exponent((0.25 - args.delta) / storage.nu,
                                         storage)
        ell, eps = ot_length(params)
        pairs = [("gamma", gamma),
                 ("capacity", depolarizing_capacity(storage)),
                 ("ell", ell), ("ot_rate", ell / args.n),
                 ("eps", eps), ("two_eps", 2.0 * eps)]
        pairs += _threshold_pairs(args, eps)
    elif args.bound == "robust":
        params = RobustParams(n=args.n, delta=args.delta, storage=storage,
                              p1_sent=args.p1_sent,
                              ph_noclick=args.ph_noclick,
                              pd_noclick=args.pd_noclick, ph_err=args.ph_err)
        ell, eps = robust_ot_length(params, ec_variant=args.ec_variant)
        pairs = [("m1", params.m1), ("m_total", params.m_total),
                 ("capacity", depolarizing_capacity(storage)),
                 ("ell", ell), ("ot_rate", ell / args.n),
                 ("eps", eps), ("two_eps", 2.0 * eps)]
        pairs += _threshold_pairs(args, eps)
    elif args.bound == "qid":
        params = QidParams(n=args.n, m=args.m, delta=args.delta,
                           storage=storage, ell=args.ell, d_code=args.d_code)
        pairs = [("mu", params.mu),
                 ("capacity", depolarizing_capacity(storage)),
                 ("error", qid_error(params))]
    else:
        params = QidParams(n=args.n, m=args.m, delta=args.delta,
                           storage=storage)
        ell, eps = impersonation_error(params)
        pairs = [("mu", params.mu),
                 ("capacity", depolarizing_capacity(storage)),
                 ("ell", ell), ("error", eps),
                 ("dishonest_user_error", dishonest_alice_error(args.m, ell))]
    _report(pairs, args.format, args.out)
    return 0


def _rows_out(rows, header, args):
    if args.format == "json":
        _emit(json.dumps([{k: row[k] for k in header} for row in rows],
                         indent=2) + "\n", args.out)
    else:
        _emit(rows_to_csv(rows, header), args.out)
    return 0


def _cmd_curve(args):
    if args.steps < 2:
        raise CliParameterError("need at least 2 grid steps")
    grid = np.linspace(args.r_min, args.r_max, args.steps)
    rows = rate_curve(args.n, args.delta, args.nu, grid, dim=args.dim)
    return _rows_out(rows, RATE_CURVE_HEADER, args)


def _cmd_region(args):
    r_steps = args.r_steps or args.steps
    nu_steps = args.nu_steps or args.steps
    rows = feasible_region(r_steps, nu_steps, r_max=args.r_max,
                           nu_max=args.nu_max, dim=args.dim)
    return _rows_out(rows, FEASIBLE_REGION_HEADER, args)


def _cmd_simulate(args):
    seed_seq = np.random.SeedSequence(args.seed)
    trial_seeds = seed_seq.spawn(args.trials)
    if args.protocol == "rot":
        failures = 0
        empties = 0
        first = None
        for ts in trial_seeds:
            t = run_rot(args.n, args.ell, args.choice,
                        rng=np.random.Generator(np.random.Philox(ts)))
            target = t.s0 if args.choice == 0 else t.s1
            failures += not np.array_equal(t.y, target)
            empties += t.i_c_empty
            first = first or t.to_json()
        report = {"protocol": "rot", "n": args.n, "ell": args.ell,
                  "choice": args.choice, "trials": args.trials,
                  "seed": args.seed, "failures": failures,
                  "empty_choice_sets": empties,
                  "first_transcript": json.loads(first)}
    elif args.protocol == "robust":
        params = RobustParams(
            n=args.n, delta=args.delta,
            storage=StorageModel(r=args.r, nu=args.nu),
            p1_sent=args.p1_sent, ph_noclick=args.ph_noclick,
            pd_noclick=args.pd_noclick, ph_err=args.ph_err, ell=args.ell)
        code = repetition_code(args.code_block)
        aborts = 0
        decode_failures = 0
        budget_ok = None
        first = None
        for ts in trial_seeds:
            t = run_robust_rot(params, code, args.choice,
                               rng=np.random.Generator(np.random.Philox(ts)),
                               eps_target=args.eps_target)
            aborts += t.abort
            if not t.abort:
                decode_failures += not t.decode_ok
                budget_ok = t.budget_ok
            first = first or t.to_json()
        report = {"protocol": "robust", "n": args.n, "ell": args.ell,
                  "choice": args.choice, "trials": args.trials,
                  "seed": args.seed, "eps_target": args.eps_target,
                  "aborts": aborts, "decode_failures": decode_failures,
                  "syndrome_budget_ok": budget_ok,
                  "first_transcript": json.loads(first)}
        if budget_ok is False:
            sys.stderr.write(
                "warning: the correction code spends more syndrome bits than "
                "the 1.2 h(ph_err) n budget assumed by the length bound\n")
    else:
        qc = qid_code(args.m, args.code_n)
        accepts = 0
        first = None
        for ts in trial_seeds:
            t = run_qid(args.w_alice, args.w_bob, qc, args.ell,
                        rng=np.random.Generator(np.random.Philox(ts)))
            accepts += t.accept
            first = first or t.to_json()
        report = {"protocol": "qid", "m": args.m, "code_n": args.code_n,
                  "ell": args.ell, "w_alice": args.w_alice,
                  "w_bob": args.w_bob, "trials": args.trials,
                  "seed": args.seed, "accepts": accepts,
                  "first_transcript": json.loads(first)}
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return 0


def _cmd_verify(args):
    suite = SUITES[args.suite]
    kwargs = {"seed": args.seed}
    if args.trials is not None and args.suite != "codes":
        kwargs["trials"] = args.trials
    report = suite(**kwargs)
    line = "%s: %d checks, %d violations\n" % (
        report["suite"], report["checks"], report["violations"])
    sys.stdout.write(line)
    return 0 if report["violations"] == 0 else 3


def dispatch(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "bounds":
            return _cmd_bounds(args)
        if args.command == "curve":
            return _cmd_curve(args)
        if args.command == "region":
            return _cmd_region(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        return _cmd_verify(args)
    except (CliParameterError, PreconditionError, ValueError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 1
    except (InfeasibleStorageError, NoPositiveLengthError) as exc:
        sys.stderr.write("infeasible: %s\n" % exc)
        return 2
    except (OptimizationError, ArithmeticError) as exc:
        sys.stderr.write("numeric failure: %s\n" % exc)
        return 3


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
