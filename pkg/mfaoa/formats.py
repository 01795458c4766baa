"""File formats: instance JSON, trajectory JSON-lines and result documents.

Floats are written by ``json`` in shortest round-trip form: never more than
17 significant digits, exact on reload and platform independent. Together
with sorted keys this makes outputs of seeded runs byte-identical.
"""

import dataclasses
import json
from collections.abc import Iterable
from pathlib import Path
from typing import Any

import numpy as np

from .dynamics.evolution import Trajectory
from .errors import InvalidInstanceError, MFAOAError
from .problems import IsingProblem

FORMAT_VERSION = 1


class ArrayJSONEncoder(json.JSONEncoder):
    """JSON encoder that handles numpy values, paths and dataclasses."""

    def default(self, o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, np.bool_):
            return bool(o)
        if isinstance(o, complex | np.complexfloating):
            return [float(o.real), float(o.imag)]
        if isinstance(o, Path):
            return str(o)
        if dataclasses.is_dataclass(o) and not isinstance(o, type):
            if hasattr(o, "to_dict"):
                return o.to_dict()
            return dataclasses.asdict(o)
        return super().default(o)


def dumps(document: Any, *, indent: int | None = 2) -> str:
    """Deterministic JSON text for a result document."""
    return json.dumps(document, cls=ArrayJSONEncoder, sort_keys=True, indent=indent)


def write_json(path: str | Path, document: Any):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(document))
        fh.write("\n")


def write_jsonl(path: str | Path, rows: Iterable[Any]):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(dumps(row, indent=None))
            fh.write("\n")


def instance_to_dict(problem: IsingProblem) -> dict[str, Any]:
    """Self-describing instance document with the strict lower triangle of J."""
    rows, cols = np.tril_indices(problem.n, k=-1)
    document = {
        "format_version": FORMAT_VERSION,
        "kind": problem.kind,
        "n": problem.n,
        "J": problem.couplings[rows, cols],
        "h": problem.fields,
        "delta": problem.driver,
        "offset": problem.energy_offset,
    }
    if problem.seed is not None:
        document["seed"] = int(problem.seed)
    return document


def instance_from_dict(document: dict[str, Any]) -> IsingProblem:
    """Rebuild an IsingProblem from its instance document."""
    version = document.get("format_version")
    if version != FORMAT_VERSION:
        raise InvalidInstanceError(f"Unsupported instance format_version: {version}")
    try:
        n = int(document["n"])
        lower = np.asarray(document["J"], dtype=float)
        rows, cols = np.tril_indices(n, k=-1)
        if lower.shape != rows.shape:
            raise InvalidInstanceError(
                f"Instance lists {lower.shape[0]} couplings, expected {rows.shape[0]}"
            )
        couplings = np.zeros((n, n))
        couplings[rows, cols] = lower
        couplings[cols, rows] = lower
        return IsingProblem(
            couplings=couplings,
            fields=document["h"],
            driver=document.get("delta"),
            energy_offset=document.get("offset", 0.0),
            kind=document.get("kind", "custom"),
            seed=document.get("seed"),
        )
    except (KeyError, TypeError) as e:
        raise InvalidInstanceError(f"Malformed instance document: {e}") from e


def save_instance(path: str | Path, problem: IsingProblem):
    write_json(path, instance_to_dict(problem))


def load_instance(path: str | Path) -> IsingProblem:
    try:
        with open(path, encoding="utf-8") as fh:
            document = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInstanceError(f"Cannot read instance file {path}: {e}") from e
    return instance_from_dict(document)


def save_trajectory(path: str | Path, trajectory: Trajectory):
    """Write a header line then one ``{k, t, spins}`` record per slice."""
    header = {
        "n": trajectory.n,
        "p": trajectory.p,
        "tau": trajectory.tau,
        "stride": trajectory.stride,
    }
    records = (
        {"k": int(k), "t": float(t), "spins": spins}
        for k, t, spins in zip(
            trajectory.steps, trajectory.times, trajectory.spins, strict=True
        )
    )
    write_jsonl(path, [header, *records])


def load_trajectory(path: str | Path, problem: IsingProblem) -> Trajectory:
    """Read a trajectory file; magnetizations are recomputed from the problem."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [json.loads(line) for line in fh if line.strip()]
    except (OSError, json.JSONDecodeError) as e:
        raise MFAOAError(f"Cannot read trajectory file {path}: {e}") from e
    if not lines:
        raise MFAOAError(f"Trajectory file {path} is empty")

    header, records = lines[0], lines[1:]
    spins = np.asarray([r["spins"] for r in records], dtype=float)
    if spins.ndim != 3 or spins.shape[1:] != (problem.n, 3):
        raise MFAOAError(
            f"Trajectory spins have shape {spins.shape}, expected (K, {problem.n}, 3)"
        )
    return Trajectory.from_spins(
        problem,
        steps=np.asarray([r["k"] for r in records], dtype=int),
        spins=spins,
        tau=float(header["tau"]),
        p=int(header["p"]),
        stride=int(header.get("stride", 1)),
    )
