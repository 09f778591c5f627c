"""
Text formats: the line-oriented circuit format, detector and detector error
model listings, and the run-length-encoded shot dump.

Circuit lines and shot records are read with small `arpeggio` grammars, one
line at a time, so that errors can name the offending line.
"""

import hashlib
import re
from typing import Dict, List, NamedTuple, Sequence, Tuple

import numpy as np
from arpeggio import (
    EOF,
    NoMatch,
    OneOrMore,
    ParserPython,
    PTNodeVisitor,
    RegExMatch,
    ZeroOrMore,
    visit_parse_tree,
)

from .circuit import (
    Circuit,
    Instruction,
    InstructionKind,
    NoiseChannel,
    NoiseKind,
    RoundKind,
    build_layout,
)
from .common import FormatError
from .dem import DecodingHypergraph
from .model import Coord, MidCycleLabel, Pauli, Timestamp
from .trajectory import Detector

# Hex runs of at least this length are written as `<digit>*<count>.`
MIN_RUN = 3

RE_SHOT_HEADER = re.compile(
    r"^#\s*circuit=(?P<circuit>[0-9a-f]+)\s+seed=(?P<seed>-?\d+)\s+detectors=(?P<detectors>\d+)$"
)
RE_HEX_RUN = re.compile(r"([0-9a-f])\1{%i,}" % (MIN_RUN - 1))


# Grammar of a circuit line
def integer():
    return RegExMatch(r"-?\d+")


def number():
    return RegExMatch(r"[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?")


def name():
    return RegExMatch(r"[A-Za-z][A-Za-z0-9]*")


def coord():
    return integer, ",", integer


def targets():
    return OneOrMore(coord)


def timestamp():
    return "@", name, ":", integer


def round_kinds():
    return OneOrMore(name)


def distance_line():
    return "DISTANCE", integer


def rounds_line():
    return "ROUNDS", round_kinds


def strength_line():
    return "STRENGTH", number


def noise_line():
    return "NOISE", name, number, targets, timestamp


def instruction_line():
    return name, targets, timestamp


def circuit_line():
    return [distance_line, rounds_line, strength_line, noise_line, instruction_line], EOF


# Grammar of a shot record
def hex_run():
    return RegExMatch(r"[0-9a-f]\*\d+\.")


def hex_digit():
    # a lone digit is never the trailing logical bit
    return RegExMatch(r"[0-9a-f](?=[0-9a-f*\s])")


def hex_body():
    return ZeroOrMore([hex_run, hex_digit])


def logical_bit():
    return RegExMatch(r"[01]")


def shot_record():
    return hex_body, logical_bit, EOF


class _Parsed(NamedTuple):
    kind: str
    payload: tuple


class _CircuitVisitor(PTNodeVisitor):
    def visit_integer(self, node, children):
        return int(node.value)

    def visit_number(self, node, children):
        return float(node.value)

    def visit_name(self, node, children):
        return str(node.value)

    def visit_coord(self, node, children):
        x2, y2 = [value for value in children if isinstance(value, int)]
        return Coord(x2, y2)

    def visit_targets(self, node, children):
        return tuple(value for value in children if isinstance(value, Coord))

    def visit_timestamp(self, node, children):
        label = children.results["name"][0]
        try:
            return Timestamp(children.results["integer"][0], MidCycleLabel[label])
        except KeyError:
            raise FormatError(f"unknown mid-cycle label `{label}`")

    def visit_round_kinds(self, node, children):
        return tuple(children.results["name"])

    def visit_distance_line(self, node, children):
        return _Parsed("distance", (children.results["integer"][0],))

    def visit_rounds_line(self, node, children):
        return _Parsed("rounds", children.results["round_kinds"][0])

    def visit_strength_line(self, node, children):
        return _Parsed("strength", (children.results["number"][0],))

    def visit_noise_line(self, node, children):
        return _Parsed(
            "noise",
            (
                children.results["name"][0],
                children.results["number"][0],
                children.results["targets"][0],
                children.results["timestamp"][0],
            ),
        )

    def visit_instruction_line(self, node, children):
        return _Parsed(
            "instruction",
            (
                children.results["name"][0],
                children.results["targets"][0],
                children.results["timestamp"][0],
            ),
        )

    def visit_circuit_line(self, node, children):
        return [value for value in children if isinstance(value, _Parsed)][0]


class _ShotVisitor(PTNodeVisitor):
    def visit_hex_run(self, node, children):
        digit, count = node.value[0], node.value[2:-1]
        return digit * int(count)

    def visit_hex_digit(self, node, children):
        return str(node.value)

    def visit_hex_body(self, node, children):
        return "".join(value for value in children if isinstance(value, str))

    def visit_logical_bit(self, node, children):
        return int(node.value)

    def visit_shot_record(self, node, children):
        body = children.results.get("hex_body", [""])[0]
        return body, children.results["logical_bit"][0]


_PARSERS: Dict[str, ParserPython] = {}


def _parser(rule) -> ParserPython:
    # Grammars are compiled on first use
    if rule.__name__ not in _PARSERS:
        _PARSERS[rule.__name__] = ParserPython(rule)
    return _PARSERS[rule.__name__]


def _parse_line(rule, visitor, line: str, lineno: int):
    try:
        tree = _parser(rule).parse(line)
        return visit_parse_tree(tree, visitor)
    except NoMatch as exc:
        raise FormatError(f"line {lineno}: cannot parse `{line}` ({exc})")
    except ValueError as exc:
        raise FormatError(f"line {lineno}: {exc}")


def format_circuit(circuit: Circuit) -> str:
    """
    Serialize a circuit: a header with the distance, round kinds and noise
    strength, one line per instruction and one line per noise channel.

    Instructions are sorted by timestamp, kind and coordinates and channels by
    id, so the output is byte-stable.
    """

    lines = [
        f"DISTANCE {circuit.distance}",
        "ROUNDS " + " ".join(str(kind) for kind in circuit.round_kinds),
    ]
    if circuit.channels:
        lines.append(f"STRENGTH {circuit.noise_strength!r}")

    lines += [str(instr) for instr in sorted(circuit.instructions(), key=Instruction.sort_key)]
    for channel in circuit.channels:
        coords = " ".join(str(target) for target in channel.targets)
        lines.append(
            f"NOISE {channel.kind} {channel.probability!r} {coords} @ {channel.timestamp}"
        )

    return "\n".join(lines) + "\n"


def _flip_of(kind: NoiseKind, target: Coord, ts: Timestamp, bases: Dict) -> Pauli:
    # The flipped Pauli anticommutes with the reset or measured basis
    basis = bases.get((kind, target, ts.round))
    if basis is None:
        raise FormatError(f"{kind} on {target} in round {ts.round} has no matching instruction")
    return Pauli.Z if basis == Pauli.X else Pauli.X


def read_circuit(text: str) -> Circuit:
    """
    Read a circuit written by `format_circuit`.

    Raises
    ------
    FormatError
        On malformed lines, unknown names, or a missing header.
    """

    distance, kinds, strength = None, None, 0.0
    instructions: List[Instruction] = []
    noise = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue

        parsed = _parse_line(circuit_line, _CircuitVisitor(), line, lineno)
        try:
            if parsed.kind == "distance":
                distance = parsed.payload[0]
            elif parsed.kind == "rounds":
                kinds = tuple(RoundKind(value) for value in parsed.payload)
            elif parsed.kind == "strength":
                strength = parsed.payload[0]
            elif parsed.kind == "noise":
                kind, prob, coords, ts = parsed.payload
                noise.append((NoiseKind(kind), prob, coords, ts))
            else:
                kind, coords, ts = parsed.payload
                instructions.append(Instruction(InstructionKind(kind), coords, ts))
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}")

    if distance is None or kinds is None:
        raise FormatError("circuit text lacks the DISTANCE or ROUNDS header")

    layers: Dict[Timestamp, List[Instruction]] = {}
    bases = {}
    for instr in sorted(instructions, key=Instruction.sort_key):
        layers.setdefault(instr.timestamp, []).append(instr)
        if instr.kind.is_reset:
            bases[(NoiseKind.FlipReset, instr.targets[0], instr.timestamp.round)] = instr.kind.basis
        elif instr.kind.is_measurement:
            bases[(NoiseKind.FlipMeasure, instr.targets[0], instr.timestamp.round)] = instr.kind.basis

    channels = []
    for idx, (kind, prob, coords, ts) in enumerate(noise):
        flip = None
        if kind in (NoiseKind.FlipReset, NoiseKind.FlipMeasure):
            flip = _flip_of(kind, coords[0], ts, bases)
        try:
            channels.append(NoiseChannel(idx, kind, prob, coords, ts, flip))
        except ValueError as exc:
            raise FormatError(f"noise channel {idx}: {exc}")

    return Circuit(
        layout=build_layout(distance),
        layers=tuple((ts, tuple(layer)) for ts, layer in sorted(layers.items())),
        round_kinds=kinds,
        channels=tuple(channels),
        noise_strength=strength if channels else 0.0,
    )


def circuit_digest(circuit: Circuit) -> str:
    return hashlib.sha256(format_circuit(circuit).encode("utf-8")).hexdigest()


def format_detectors(detectors: Sequence[Detector]) -> str:
    """
    One `DET x2 y2 t2 : M kind x2,y2@round ...` line per detector, in
    coordinate order.
    """

    lines = []
    for det in sorted(detectors, key=Detector.sort_key):
        x2, y2, t2 = det.coordinate
        meas = " ".join(
            f"M {m.basis.name} {m.coord}@{m.round}"
            for m in sorted(det.measurements, key=lambda m: m.sort_key())
        )
        lines.append(f"DET {x2} {y2} {t2} : {meas}")

    return "\n".join(lines) + "\n"


def format_dem(hypergraph: DecodingHypergraph) -> str:
    """
    One `EDGE p dZ:[ids] dX:[ids] L:0|1 faults:[channel ids]` line per edge,
    in edge id order.
    """

    def _ids(values) -> str:
        return "[" + ",".join(str(value) for value in sorted(values)) + "]"

    lines = [
        f"EDGE {edge.probability:.12g} dZ:{_ids(edge.dz)} dX:{_ids(edge.dx)} "
        f"L:{int(edge.logical_flip)} faults:{_ids(edge.channels)}"
        for edge in hypergraph.edges
    ]

    return "\n".join(lines) + "\n"


def _encode_bits(bits) -> str:
    bits = np.asarray(bits, dtype=np.uint8)
    digits = np.packbits(bits).tobytes().hex()[: (len(bits) + 3) // 4]
    return RE_HEX_RUN.sub(lambda match: f"{match.group(1)}*{len(match.group(0))}.", digits)


def _decode_bits(digits: str, n_bits: int) -> np.ndarray:
    if len(digits) != (n_bits + 3) // 4:
        raise FormatError(f"expected {(n_bits + 3) // 4} hex digits, got {len(digits)}")
    padded = digits + "0" * (len(digits) % 2)
    bits = np.unpackbits(np.frombuffer(bytes.fromhex(padded), dtype=np.uint8))
    return bits[:n_bits]


def format_shots(detector_bits, logical_bits, digest: str, seed: int) -> str:
    """
    Write sampled shots: a header naming the circuit digest, the seed and the
    number of detectors, then one `<rle hex> <logical bit>` line per shot.
    """

    detector_bits = np.asarray(detector_bits, dtype=np.uint8)
    n_det = detector_bits.shape[1] if detector_bits.ndim == 2 else 0
    lines = [f"# circuit={digest[:16]} seed={seed} detectors={n_det}"]
    for row, bit in zip(detector_bits, logical_bits):
        lines.append(f"{_encode_bits(row)} {int(bit)}")

    return "\n".join(lines) + "\n"


def read_shots(text: str) -> Tuple[Dict[str, object], np.ndarray, np.ndarray]:
    """
    Read a shot dump written by `format_shots`.

    Returns
    -------
    header : dict
        The circuit digest prefix, the seed and the number of detectors.
    detector_bits : ndarray
        `(shots, detectors)` array of uint8.
    logical_bits : ndarray
        Logical bit of every shot.
    """

    lines = text.splitlines()
    if not lines or (match := RE_SHOT_HEADER.match(lines[0].strip())) is None:
        raise FormatError("shot dump lacks its `# circuit=... seed=... detectors=...` header")
    header = {
        "circuit": match.group("circuit"),
        "seed": int(match.group("seed")),
        "detectors": int(match.group("detectors")),
    }

    rows, logical = [], []
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        digits, bit = _parse_line(shot_record, _ShotVisitor(), line, lineno)
        try:
            rows.append(_decode_bits(digits, header["detectors"]))
        except (FormatError, ValueError) as exc:
            raise FormatError(f"line {lineno}: {exc}")
        logical.append(bit)

    detector_bits = np.array(rows, dtype=np.uint8).reshape(len(rows), header["detectors"])

    return header, detector_bits, np.array(logical, dtype=np.uint8)
