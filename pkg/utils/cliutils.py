"""
Command line front end: argument parsing, command dispatch and the json / csv /
pretty renderers. Every command returns a plain result dict that is wrapped in
the {"tool", "version", "config", "result"} envelope before rendering.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

from utils.configutils import (
    TOOL_NAME, TOOL_VERSION, DEFAULT_MAX_D, Mode, OutputFormat, RunConfig, load_settings,
)
from utils.cycloutils import CycloScalar
from utils.entangleutils import (
    bell_state, choi, is_mes, mes_mub_state, pauli_word, reduced_state, subspace_coordinates,
)
from utils.errorutils import (
    MissingParameter, MuubError, NotUnitaryFamily, VerificationFailed, repeat_until_finish,
)
from utils.hilbertutils import all_mubs, mub_basis, mub_state, label_to_json
from utils.logutils import configure_logging
from utils.matspaceutils import to_dense
from utils.muubutils import (
    extend_with_counterexample, family_report, muub_basis, muub_element, muub_family,
)
from utils.oracleutils import FloatOracle
from utils.selftestutils import run_selftest

logger = logging.getLogger(__name__)

GREEN = "\033[32m"
RED = "\033[31m"
BOLD = "\033[1m"
RESET = "\033[0m"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int, help="dimension (odd prime; pauli and bell also accept 2)")
    common.add_argument("--r", type=int, help="basis index")
    common.add_argument("--s", type=int, help="member index within a basis")
    common.add_argument("--a", type=int, help="Z exponent of the Pauli word")
    common.add_argument("--b", type=int, help="X exponent of the Pauli word")
    common.add_argument("--n", type=int, help="power of the Pauli word")
    common.add_argument("--all", action="store_true", help="emit every basis")
    common.add_argument("--mode", choices=[str(m) for m in Mode], default=str(Mode.EXACT))
    common.add_argument("--format", dest="output_format", choices=[str(f) for f in OutputFormat],
                        default=str(OutputFormat.JSON))
    common.add_argument("--out", help="write the output to this path instead of stdout")
    common.add_argument("--seed", type=int, help="seed for randomised sweeps")
    common.add_argument("--samples", type=int, help="samples per dimension in randomised sweeps")
    common.add_argument("--max-d", dest="max_d", type=int, default=DEFAULT_MAX_D,
                        help="largest dimension tested by selftest")
    common.add_argument("--workers", type=int, help="threads used for pair verification")
    common.add_argument("--log-level", dest="log_level", help="DEBUG, INFO, WARNING or ERROR")
    common.add_argument("--inject-fault", dest="inject_fault", action="store_true", help=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="main.py", description="Mutually unbiased unitary bases in exact cyclotomic arithmetic.")
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("mub", parents=[common], help="mutually unbiased bases of H_d")
    sub.add_parser("muub", parents=[common], help="the family of unitary bases of M_s")
    sub.add_parser("verify", parents=[common], help="verify the whole family and the r = 0 counterexample")
    sub.add_parser("bell", parents=[common], help="generalised Bell state with its MES audit")
    sub.add_parser("mes", parents=[common], help="maximally entangled state from a Pauli-word family")
    sub.add_parser("pauli", parents=[common], help="(X^b Z^a)^n against its closed form")
    sub.add_parser("selftest", parents=[common], help="run every invariant suite")
    return parser


def config_from_args(args, settings) -> RunConfig:
    return RunConfig(
        command=args.command,
        d=args.d, r=args.r, s=args.s, a=args.a, b=args.b,
        all=args.all,
        n=args.n,
        mode=Mode(args.mode),
        output_format=OutputFormat(args.output_format),
        out=args.out,
        seed=settings.seed if args.seed is None else args.seed,
        samples=settings.samples if args.samples is None else args.samples,
        max_d=args.max_d,
        workers=settings.workers if args.workers is None else max(1, args.workers),
        inject_fault=args.inject_fault,
    )


def scalar_json(x: CycloScalar, mode: Mode):
    if mode is Mode.FLOAT:
        z = x.to_complex()
        return [z.real, z.imag]
    return x.to_dict()


def ket_json(ket, mode: Mode):
    data = {"d": ket.d, "amps": [scalar_json(x, mode) for x in ket.amps]}
    if len(ket.amps) != ket.d:
        data["index"] = "m*d+n"
    return data


def matrix_json(op, mode: Mode):
    return {"d": op.d, "size": op.size,
            "entries": [[scalar_json(x, mode) for x in row] for row in op.entries]}


def rational_json(x: CycloScalar):
    q = x.as_rational()
    return [q.numerator, q.denominator]


def _require(config: RunConfig, *names):
    missing = [f"--{name}" for name in names if getattr(config, name) is None]
    if missing:
        raise MissingParameter(f"missing required flag(s): {', '.join(missing)}")


def _require_basis_for_member(config: RunConfig):
    if config.s is not None and config.r is None and not config.all:
        raise MissingParameter("--s picks a member of one basis and needs --r")


def cmd_mub(config: RunConfig):
    _require(config, "d")
    _require_basis_for_member(config)
    d, mode = config.d, config.mode
    if config.r is not None and config.s is not None and not config.all:
        state = mub_state(d, config.r, config.s)
        return {"d": d, "r": config.r, "s": config.s, "state": ket_json(state, mode)}
    if config.r is not None and not config.all:
        bases = [mub_basis(d, config.r)]
    else:
        bases = all_mubs(d)
    return {
        "d": d,
        "bases": [{"label": label_to_json(basis.label),
                   "states": [ket_json(k, mode) for k in basis.states]} for basis in bases],
    }


def cmd_muub(config: RunConfig):
    _require(config, "d")
    _require_basis_for_member(config)
    d, mode = config.d, config.mode
    if config.r == 0:
        raise NotUnitaryFamily("r = 0 is excluded from the family; run `verify` to see the counterexample")
    if config.r is not None and config.s is not None and not config.all:
        element = muub_element(d, config.r, config.s)
        return {
            "d": d, "r": config.r, "s": config.s,
            "xcoeffs": [scalar_json(x, mode) for x in element.xcoeffs],
            "dense": matrix_json(to_dense(element), mode),
        }
    bases = [muub_basis(d, config.r)] if config.r is not None and not config.all else muub_family(d)
    return {
        "d": d,
        "bases": [{"label": label_to_json(basis.label),
                   "ops": [[scalar_json(x, mode) for x in m.xcoeffs] for m in basis.ops]}
                  for basis in bases],
    }


def cmd_verify(config: RunConfig):
    _require(config, "d")
    report = family_report(config.d, config.workers)
    extension = extend_with_counterexample(config.d)
    result = report.to_dict()
    result["r0_extension"] = {
        "member_unitary": list(extension.member_unitary),
        "unbiased_with_family": extension.unbiased_with_family,
        "admitted": extension.admitted,
    }
    passed = report.passed and not extension.admitted
    if config.mode is Mode.FLOAT:
        oracle = FloatOracle()
        family = oracle.muub_family(config.d)
        index = {label: i for i, label in enumerate(report.labels)}
        worst = 0.0
        for pair in report.reports:
            fa, fb = family[index[pair.label_a]], family[index[pair.label_b]]
            approx = [oracle.hs_overlap_squared(x, y) for x in fa for y in fb]
            worst = max(worst, oracle.deviation([v for row in pair.values for v in row], approx))
        result["max_deviation"] = worst
        passed = passed and oracle.agrees(worst)
    result["verdict"] = "pass" if passed else "fail"
    return result, passed


def _mes_audit(psi, mode: Mode):
    return {
        "is_mes": is_mes(psi),
        "norm_squared": rational_json(psi.norm_squared()),
        "reduced_states": {str(side): matrix_json(reduced_state(psi, side), mode) for side in (1, 2)},
    }


def cmd_bell(config: RunConfig):
    _require(config, "d")
    a = 0 if config.a is None else config.a
    b = 0 if config.b is None else config.b
    psi = bell_state(config.d, a, b)
    result = {"d": config.d, "a": a, "b": b, "state": ket_json(psi, config.mode)}
    result.update(_mes_audit(psi, config.mode))
    result["equals_choi"] = psi == choi(pauli_word(config.d, b, a, 1).op)
    return result


def cmd_mes(config: RunConfig):
    _require(config, "d", "r", "s", "a", "b")
    d, r, s, a, b = config.d, config.r, config.s, config.a, config.b
    psi = mes_mub_state(d, r, s, a, b)
    result = {"d": d, "r": r, "s": s, "a": a, "b": b, "state": ket_json(psi, config.mode)}
    result.update(_mes_audit(psi, config.mode))
    result["coordinates"] = ket_json(subspace_coordinates(psi, a, b), config.mode)
    result["overlaps"] = [
        {"r": other, "values": [rational_json(psi.inner(mes_mub_state(d, other, t, a, b)).abs_squared())
                                for t in range(d)]}
        for other in range(1, d) if other != r
    ]
    return result


def cmd_pauli(config: RunConfig):
    _require(config, "d")
    word = pauli_word(config.d, config.b or 0, config.a or 0, 1 if config.n is None else config.n)
    result = word.to_dict(float_mode=config.mode is Mode.FLOAT)
    return result, word.holds()


def cmd_selftest(config: RunConfig):
    report = run_selftest(max_d=config.max_d, seed=config.seed, samples=config.samples,
                          workers=config.workers, inject_fault=config.inject_fault)
    for suite in report.suites:
        status = "ok" if suite.passed else "FAILED"
        print(f"{suite.name}: {status} ({suite.checks} checks, {suite.seconds:.2f}s)", file=sys.stderr)
    return report.to_dict(), report.passed


HANDLERS = {
    "mub": cmd_mub,
    "muub": cmd_muub,
    "verify": cmd_verify,
    "bell": cmd_bell,
    "mes": cmd_mes,
    "pauli": cmd_pauli,
    "selftest": cmd_selftest,
}


def envelope(config: RunConfig, result) -> dict:
    return {"tool": TOOL_NAME, "version": TOOL_VERSION, "config": config.to_dict(), "result": result}


def render_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _fraction_cell(pair):
    num, den = pair
    return str(num) if den == 1 else f"{num}/{den}"


def _modulus_squared(value) -> str:
    if isinstance(value, list):
        re, im = value
        return repr(re * re + im * im)
    sq = CycloScalar.from_dict(value).abs_squared()
    if not sq.is_rational():
        return repr(sq.to_complex().real)
    q = sq.as_rational()
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def render_csv(config: RunConfig, result: dict) -> str:
    """Modulus-squared tables only; complex data stays in the json output."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    command = config.command
    if command == "verify":
        writer.writerow(["a", "b", "i", "j", "value"])
        d = result["d"]
        for pair in result["pairs"]:
            for k, cell in enumerate(pair["values"]):
                writer.writerow([pair["a"], pair["b"], k // d, k % d, _fraction_cell(cell)])
    elif command == "mes":
        writer.writerow(["r", "t", "value"])
        for row in result["overlaps"]:
            for t, cell in enumerate(row["values"]):
                writer.writerow([row["r"], t, _fraction_cell(cell)])
    elif command == "selftest":
        writer.writerow(["suite", "passed", "checks", "failures"])
        for suite in result["suites"]:
            writer.writerow([suite["name"], suite["passed"], suite["checks"], suite["failures"]])
    else:
        writer.writerow(["item", "index", "value"])
        for item, amps in _amplitude_rows(result):
            for index, amp in enumerate(amps):
                writer.writerow([item, index, _modulus_squared(amp)])
    return buf.getvalue()


def _amplitude_rows(result: dict):
    if "state" in result:
        yield "state", result["state"]["amps"]
    elif "xcoeffs" in result:
        yield "element", result["xcoeffs"]
    elif "bases" in result:
        for basis in result["bases"]:
            members = basis.get("states") or basis.get("ops")
            for s, member in enumerate(members):
                values = member["amps"] if isinstance(member, dict) else member
                yield f"{basis['label']}:{s}", values
    elif "op" in result:
        for i, row in enumerate(result["op"]["entries"]):
            yield f"row{i}", row


def _paint(text, color, no_color):
    return text if no_color else f"{color}{text}{RESET}"


def render_pretty(doc: dict, no_color=False) -> str:
    config, result = doc["config"], doc["result"]
    lines = [_paint(f"{doc['tool']} {doc['version']} :: {config['command']}", BOLD, no_color)]
    for key, value in result.items():
        if isinstance(value, (dict, list)):
            text = json.dumps(value)
            if len(text) > 120:
                text = text[:117] + "..."
        else:
            text = str(value)
        if key in ("verdict", "is_mes", "holds", "equals_choi", "passed"):
            ok = value in ("pass", True)
            text = _paint(text, GREEN if ok else RED, no_color)
        lines.append(f"  {key}: {text}")
    return "\n".join(lines) + "\n"


def emit(text: str, out_path=None):
    if out_path is None:
        sys.stdout.write(text)
        return

    def write():
        with open(out_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)

    repeat_until_finish(write)


def run(config: RunConfig, no_color=False) -> int:
    outcome = HANDLERS[config.command](config)
    result, passed = outcome if isinstance(outcome, tuple) else (outcome, True)
    doc = envelope(config, result)
    if config.output_format is OutputFormat.CSV:
        text = render_csv(config, result)
    elif config.output_format is OutputFormat.PRETTY:
        text = render_pretty(doc, no_color)
    else:
        text = render_json(doc)
    emit(text, config.out)
    if not passed:
        failed = result.get("failed_suites") if isinstance(result, dict) else None
        raise VerificationFailed(
            f"verification failed: {', '.join(failed)}" if failed else "verification failed")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    settings = load_settings()
    configure_logging(settings.log_dir, args.log_level or settings.log_level)
    config = config_from_args(args, settings)
    logger.info("running %s with %s", config.command, config.to_dict())
    try:
        return run(config, settings.no_color)
    except MuubError as e:
        logger.info("%s failed: %s", config.command, e)
        print(f"Error: {e}", file=sys.stderr)
        return e.exit_code
