#!/usr/bin/env python3

"""
Entry point for the command line `foldsurf` utility.
"""

# Import Python standard libraries
import argparse
import json
import logging
import sys

# Import our library
import foldsurf
from foldsurf.harness import ExperimentSpec, Family


def parse_arguments(argv=None):
    """
    Parse command-line arguments and return as a namespace.

    Returns
    -------
    args : namespace
        A namespace with all the parameters.
    """

    # Define the parser
    parser = argparse.ArgumentParser(description="Fold-transversal surface code toolkit.")
    parser.add_argument(
        "command",
        choices=["build", "detectors", "dem", "sample", "decode", "sweep", "aod-plan", "verify"],
        help="Action to perform.",
    )
    parser.add_argument(
        "--family",
        choices=[str(family) for family in Family],
        default="xmemory",
        help="Circuit family (default: xmemory).",
    )
    parser.add_argument("-d", type=int, default=3, help="Code distance (default: 3).")
    parser.add_argument(
        "--rounds", type=int, help="Syndrome-extraction rounds of an X-memory (default: 2d)."
    )
    parser.add_argument("--n-pad", type=int, help="S-2 padding rounds (default: ceil(d/2)).")
    parser.add_argument("--n-m", type=int, help="S-2 rounds between the S rounds (default: d+1).")
    parser.add_argument("-p", type=float, default=0.0, help="Noise strength (default: 0).")
    parser.add_argument("--seed", type=int, default=0, help="Random seed (default: 0).")
    parser.add_argument("--shots", type=int, default=1000, help="Number of shots (default: 1000).")
    parser.add_argument(
        "--decoder",
        choices=[str(mode) for mode in foldsurf.DecoderMode],
        default="plain",
        help="Decoder variant (default: plain).",
    )
    parser.add_argument("--out", type=str, help="Output file (default: stdout).")
    parser.add_argument("--max-errors", type=int, help="Stop sampling after this many errors.")
    parser.add_argument("--workers", type=int, default=1, help="Worker processes (default: 1).")
    parser.add_argument("--config", type=str, help="JSON sweep configuration.")
    parser.add_argument("--shots-file", type=str, help="Shot dump to decode.")
    parser.add_argument(
        "--detail", action="store_true", help="Write per-shot decoding diagnostics."
    )
    parser.add_argument("--log-level", default="WARNING", help="Logging level (default: WARNING).")

    # parse arguments and return
    args = parser.parse_args(argv)

    return args


def build_spec(args) -> ExperimentSpec:
    return ExperimentSpec(
        family=Family(args.family),
        d=args.d,
        p=args.p,
        rounds=args.rounds,
        n_pad=args.n_pad,
        n_m=args.n_m,
        decoder=args.decoder,
        shots=args.shots,
        seed=args.seed,
        max_errors=args.max_errors,
    )


def write_output(text: str, out=None):
    if out:
        with open(out, "w", encoding="utf-8") as handler:
            handler.write(text)
    else:
        sys.stdout.write(text)


def decode_command(args, spec: ExperimentSpec) -> str:
    circuit = spec.build_circuit()
    detectors = foldsurf.enumerate_detectors(circuit)
    hypergraph = foldsurf.build_hypergraph(circuit, detectors)
    graphs = foldsurf.DecodingGraphs(hypergraph)
    reference = hypergraph.observable.reference_value

    if args.shots_file:
        with open(args.shots_file, encoding="utf-8") as handler:
            header, det_bits, logical = foldsurf.read_shots(handler.read())
        if not foldsurf.circuit_digest(circuit).startswith(header["circuit"]):
            raise foldsurf.FormatError("shot dump was sampled from a different circuit")
    else:
        simulator = foldsurf.FrameSimulator(circuit, detectors, hypergraph.observable)
        det_bits, logical = simulator.sample(spec.shots, spec.seed)

    config = foldsurf.DecoderConfig.from_name(spec.decoder)
    results = foldsurf.decode_batch(det_bits, graphs, config)

    lines, errors = [], 0
    for idx, (result, bit) in enumerate(zip(results, logical)):
        flip = bool(int(bit) ^ reference)
        errors += int(result.logical_correction != flip)
        if args.detail:
            record = {
                "shot": idx,
                "logical_correction": result.logical_correction,
                "observed_flip": flip,
                **result.diagnostics,
            }
            lines.append(json.dumps(record, sort_keys=True))

    if args.detail:
        return "\n".join(lines) + "\n"

    mle, low, high = foldsurf.likelihood_interval(errors, len(results))
    return f"shots={len(results)} errors={errors} ler={mle:.6e} ci=[{low:.6e}, {high:.6e}]\n"


def main(argv=None):
    """
    Entry point for the command-line utility.
    """

    args = parse_arguments(argv)
    logging.basicConfig(level=getattr(logging, args.log_level.upper(), logging.WARNING))

    # Sweeps read their experiments from the config file when given
    if args.command == "sweep":
        if args.config:
            config = foldsurf.load_sweep_config(args.config)
            specs, master_seed, workers = config.specs, config.master_seed, config.workers
        else:
            specs, master_seed, workers = [build_spec(args)], None, args.workers
        rows = foldsurf.sweep(specs, out=args.out, workers=workers, master_seed=master_seed)
        if not args.out:
            for row in rows:
                print(",".join(str(value) for value in row.to_dict().values()))
        return 0 if len(rows) == len(specs) else 1

    spec = build_spec(args)
    if args.command == "build":
        write_output(foldsurf.format_circuit(spec.build_circuit()), args.out)
    elif args.command == "detectors":
        detectors = foldsurf.enumerate_detectors(spec.build_circuit())
        write_output(foldsurf.format_detectors(detectors), args.out)
    elif args.command == "dem":
        write_output(foldsurf.format_dem(foldsurf.build_hypergraph(spec.build_circuit())), args.out)
    elif args.command == "sample":
        experiment = foldsurf.CompiledExperiment.compile(spec)
        det_bits, logical = experiment.sample(0, spec.shots)
        digest = foldsurf.circuit_digest(experiment.circuit)
        write_output(foldsurf.format_shots(det_bits, logical, digest, spec.seed), args.out)
    elif args.command == "decode":
        write_output(decode_command(args, spec), args.out)
    elif args.command == "aod-plan":
        layout = foldsurf.build_layout(spec.d)
        plan = foldsurf.plan_rotation(layout.qubits, layout.center)
        report = foldsurf.verify_plan(plan, layout.qubits)
        lines = plan.to_lines() + [
            f"# batches={len(plan.batches)} violations={len(report.violations)} "
            f"accepted={int(report.accepted)}"
        ]
        write_output("\n".join(lines) + "\n", args.out)
    elif args.command == "verify":
        report = foldsurf.verify_circuit(spec)
        write_output("\n".join(report.to_lines()) + "\n", args.out)
        return 0 if report.passed else 1

    return 0


if __name__ == "__main__":
    sys.exit(main())
