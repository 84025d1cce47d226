"""File formats: system/adjacency JSON and trajectory CSV.

Matrix entries in JSON may be plain doubles or exact-rational strings like
"3/5"; rationals are parsed via fractions and rounded once to the nearest
double, so shipped fixtures are unambiguous. CSV doubles are printed with 17
significant digits for bit-exact round trips.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from .dynsys import CoupledCellSystem, LinearSystem

EXAMPLE1_NAMES = ("left", "middle", "right")


def parse_entry(value) -> float:
    """A JSON matrix entry: a number, or a "p/q" rational string."""
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        return float(Fraction(value))
    raise ValueError(f"matrix entries must be numbers or 'p/q' strings, got {value!r}")


def _parse_matrix(rows) -> np.ndarray:
    return np.array([[parse_entry(v) for v in row] for row in rows], dtype=float)


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def _matrix_payload(a: np.ndarray) -> list[list[float]]:
    return [[float(v) for v in row] for row in a]


def save_system(path, system: LinearSystem | CoupledCellSystem) -> None:
    path = Path(path)
    if isinstance(system, LinearSystem):
        payload = {"kind": "linear", "n": system.n, "A": _matrix_payload(system.a)}
    elif isinstance(system, CoupledCellSystem):
        payload = {
            "kind": "coupled",
            "d": system.d,
            "alpha": [float(v) for v in system.alpha],
            "beta": [float(v) for v in system.beta],
            "gamma": [float(v) for v in system.gamma],
            "S": _matrix_payload(system.coupling),
            "epsilon": float(system.epsilon),
        }
    else:
        raise TypeError(f"cannot serialize {type(system).__name__}")
    path.write_text(json.dumps(payload, indent=2) + "\n")


def load_system(path) -> LinearSystem | CoupledCellSystem:
    data = json.loads(Path(path).read_text())
    kind = data.get("kind", "linear")
    if kind == "coupled":
        return CoupledCellSystem(
            alpha=np.array(data["alpha"], dtype=float),
            beta=np.array(data["beta"], dtype=float),
            gamma=np.array(data["gamma"], dtype=float),
            coupling=_parse_matrix(data["S"]),
            epsilon=float(data["epsilon"]),
        )
    if kind == "linear":
        if "A" not in data:
            raise ValueError(
                "not a system file: key 'A' missing (adjacency files use 'W')"
            )
        a = _parse_matrix(data["A"])
        if "n" in data and int(data["n"]) != a.shape[0]:
            raise ValueError(f"declared n = {data['n']} but A is {a.shape[0]}x{a.shape[1]}")
        return LinearSystem(a)
    raise ValueError(f"unknown system kind {kind!r}")


def save_adjacency(path, w: np.ndarray) -> None:
    w = np.asarray(w, dtype=float)
    payload = {"n": w.shape[0], "W": _matrix_payload(w)}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_adjacency(path) -> np.ndarray:
    data = json.loads(Path(path).read_text())
    if "W" not in data:
        raise ValueError("not an adjacency file: key 'W' missing (system files use 'A')")
    w = _parse_matrix(data["W"])
    if "n" in data and int(data["n"]) != w.shape[0]:
        raise ValueError(f"declared n = {data['n']} but W is {w.shape[0]}x{w.shape[1]}")
    return w


def save_trajectory(path, states: np.ndarray) -> None:
    """CSV with header k,x1,...,xn and one row per time step."""
    states = np.atleast_2d(np.asarray(states, dtype=float))
    n = states.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k"] + [f"x{i}" for i in range(1, n + 1)])
        for k, row in enumerate(states):
            writer.writerow([k] + [format_float(v) for v in row])


def load_trajectory(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[0] != "k":
            raise ValueError("trajectory CSV must start with a 'k,x1,...' header")
        rows = [[float(v) for v in row[1:]] for row in reader]
    if not rows:
        raise ValueError("trajectory CSV holds no states")
    return np.array(rows, dtype=float)


def example1_path(which: str) -> Path:
    """Path of one of the shipped 3x3 non-localizable benchmark systems."""
    if which not in EXAMPLE1_NAMES:
        raise ValueError(f"which must be one of {EXAMPLE1_NAMES}")
    return Path(str(resources.files("localspec").joinpath(f"fixtures/example1_{which}.json")))


def example1_system(which: str) -> LinearSystem:
    return load_system(example1_path(which))
