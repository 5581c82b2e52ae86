"""Text instance format.

    MRF 1
    <node_count> <L> <edge_count> <lambda> [<constant>]
    node_count lines of L unary costs
    edge_count blocks: a "<p> <q>" line followed by L lines of L pairwise costs

Reals are written with 17 significant digits, which round-trips doubles.
Labeling files hold one integer label per line.
"""
import pathlib
from typing import Iterator, List, Tuple

import numpy as np
from parse import parse

from .exceptions import InstanceFormatError, InvalidInputError
from .logger import logger as log
from .model import DiscreteEnergy

MAGIC = "MRF"
VERSION = 1


def _real(value: float) -> str:
    return f"{value:.17g}"


def format_energy(energy: DiscreteEnergy) -> str:
    header = f"{energy.node_count} {energy.label_count} {energy.edge_count} {_real(energy.coupling)}"
    if energy.constant != 0:
        header += f" {_real(energy.constant)}"

    lines = [f"{MAGIC} {VERSION}", header]
    lines += [" ".join(map(_real, row)) for row in energy.unary.tolist()]
    for (p, q), table in zip(energy.edges.tolist(), energy.pairwise.tolist()):
        lines.append(f"{p} {q}")
        lines += [" ".join(map(_real, row)) for row in table]
    return "\n".join(lines) + "\n"


def write_energy(energy: DiscreteEnergy, path: pathlib.Path) -> pathlib.Path:
    with open(path, "w", encoding="utf-8") as f:
        f.write(format_energy(energy))
    log.debug(f"Wrote {energy.node_count}-node instance to {path}")
    return pathlib.Path(path)


class _Lines:
    """Non-blank lines with their 1-based line numbers."""

    def __init__(self, text: str):
        self._lines: Iterator[Tuple[int, str]] = (
            (number, " ".join(line.split()))
            for number, line in enumerate(text.splitlines(), start=1)
            if line.strip()
        )
        self.number = 0

    def next(self, what: str) -> str:
        try:
            self.number, line = next(self._lines)
        except StopIteration:
            raise InstanceFormatError(f"unexpected end of file, expected {what}", self.number + 1)
        return line

    def reals(self, count: int, what: str) -> List[float]:
        fields = self.next(what).split()
        if len(fields) != count:
            raise InstanceFormatError(f"expected {count} values for {what}", self.number)
        try:
            return [float(field) for field in fields]
        except ValueError as exc:
            raise InstanceFormatError(f"bad number in {what}: {exc}", self.number) from exc

    def done(self) -> bool:
        return next(self._lines, None) is None


def parse_energy(text: str) -> DiscreteEnergy:
    lines = _Lines(text)

    magic = parse("MRF {version:d}", lines.next("the MRF header"))
    if magic is None:
        raise InstanceFormatError("missing 'MRF <version>' header", lines.number)
    if magic["version"] != VERSION:
        raise InstanceFormatError(f"unsupported format version {magic['version']}", lines.number)

    sizes = lines.next("the size line")
    header = parse("{n:d} {L:d} {m:d} {coupling:g} {constant:g}", sizes) or parse(
        "{n:d} {L:d} {m:d} {coupling:g}", sizes
    )
    if header is None:
        raise InstanceFormatError(
            "expected '<node_count> <L> <edge_count> <lambda> [<constant>]'", lines.number
        )
    n, L, m = header["n"], header["L"], header["m"]
    if n <= 0 or L <= 0 or m < 0:
        raise InstanceFormatError("node count and L must be positive", lines.number)

    unary = [lines.reals(L, f"unary costs of node {p}") for p in range(n)]

    edges, pairwise = [], []
    for e in range(m):
        pair = parse("{p:d} {q:d}", lines.next(f"endpoints of edge {e}"))
        if pair is None:
            raise InstanceFormatError(f"expected '<p> <q>' for edge {e}", lines.number)
        edges.append((pair["p"], pair["q"]))
        pairwise.append([lines.reals(L, f"pairwise row {i} of edge {e}") for i in range(L)])

    if not lines.done():
        raise InstanceFormatError("trailing content after the last edge", lines.number + 1)

    try:
        return DiscreteEnergy.from_tables(
            n,
            edges,
            np.array(unary).reshape(n, L),
            np.array(pairwise).reshape(m, L, L),
            coupling=header["coupling"],
            constant=header.named.get("constant", 0.0),
        )

    except InvalidInputError as exc:
        raise InstanceFormatError(f"invalid instance: {exc}") from exc


def read_energy(path: pathlib.Path) -> DiscreteEnergy:
    with open(path, "r", encoding="utf-8") as f:
        energy = parse_energy(f.read())
    log.debug(f"Read {energy.node_count}-node, {energy.edge_count}-edge instance from {path}")
    return energy


def write_labeling(x, path: pathlib.Path) -> pathlib.Path:
    with open(path, "w", encoding="utf-8") as f:
        f.writelines(f"{int(label)}\n" for label in np.asarray(x).tolist())
    return pathlib.Path(path)


def read_labeling(path: pathlib.Path) -> np.ndarray:
    labels = []
    with open(path, "r", encoding="utf-8") as f:
        for number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                labels.append(int(line))
            except ValueError as exc:
                raise InstanceFormatError(f"bad label {line.strip()!r}", number) from exc
    return np.array(labels, dtype=np.int64)
