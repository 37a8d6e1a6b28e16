"""JSON schemas and canonical (byte-reproducible) report output.

Numbers print with 17 significant digits so every float survives a
round trip through text.  Dictionaries keep construction order, which the
builders keep deterministic; identical inputs therefore produce identical
bytes.  The full schema catalogue lives in docs/schemas.md.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .algebra import OperatorAlgebra, State, full_matrix_algebra, generate_algebra
from .channels import ClassicalQuantumChannel, ClassifyingSpace
from .dhrnet import LatticeNet
from .groups import FiniteGroup, UnitaryRep, builtin_group
from .thermal import HamiltonianSystem, ObservableHierarchy, ThermalGrid


class InputFormatError(ValueError):
    """Malformed or inconsistent input data."""


# ---------------------------------------------------------------------------
# canonical writer
# ---------------------------------------------------------------------------


def format_float(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        raise ValueError(f"non-finite value {x!r} in report")
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return f"{x:.17g}"


def _dump(obj: Any, indent: int, pieces: list[str]) -> None:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            pieces.append("{}")
            return
        pieces.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            pieces.append(f"{pad}  {json.dumps(str(k))}: ")
            _dump(v, indent + 1, pieces)
            pieces.append(",\n" if i < len(obj) - 1 else "\n")
        pieces.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            pieces.append("[]")
            return
        simple = all(isinstance(v, (int, float, bool, str, np.integer,
                                    np.floating)) or v is None for v in seq)
        if simple:
            pieces.append("[" + ", ".join(_scalar(v) for v in seq) + "]")
            return
        pieces.append("[\n")
        for i, v in enumerate(seq):
            pieces.append(pad + "  ")
            _dump(v, indent + 1, pieces)
            pieces.append(",\n" if i < len(seq) - 1 else "\n")
        pieces.append(pad + "]")
    else:
        pieces.append(_scalar(obj))


def _scalar(v: Any) -> str:
    if v is None or isinstance(v, bool):
        return json.dumps(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(float(v))
    if isinstance(v, str):
        return json.dumps(v)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def dumps_canonical(obj: Any) -> str:
    pieces: list[str] = []
    _dump(obj, 0, pieces)
    pieces.append("\n")
    return "".join(pieces)


def write_report(path, obj: Any) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_canonical(obj))


def format_csv(rows: list[list], header: list[str]) -> str:
    """Deterministic CSV with 17-significant-digit numbers."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            format_float(float(v)) if isinstance(v, (float, np.floating))
            else str(v)
            for v in row
        ))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# matrices, states, algebras
# ---------------------------------------------------------------------------


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": [float(x) for x in m.real.reshape(-1)],
        "im": [float(x) for x in m.imag.reshape(-1)],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (KeyError, TypeError) as err:
        raise InputFormatError(f"bad matrix object: {err}") from err
    if re.size != rows * cols or im.size != rows * cols:
        raise InputFormatError(
            f"matrix entries ({re.size}) do not match {rows}x{cols}"
        )
    return (re + 1j * im).reshape(rows, cols)


def state_to_json(s: State) -> dict:
    return {"label": s.label, "density": matrix_to_json(s.density)}


def state_from_json(obj) -> State:
    if "density" not in obj:
        raise InputFormatError("state object needs a 'density' field")
    s = State(matrix_from_json(obj["density"]), label=str(obj.get("label", "")))
    s.validate(tol=1e-8)
    return s


def algebra_to_json(alg: OperatorAlgebra) -> list:
    return [matrix_to_json(b) for b in alg.basis]


def algebra_from_json(obj) -> OperatorAlgebra:
    """Either {"full_dim": d} or a list of generator matrices to close."""
    if isinstance(obj, dict) and "full_dim" in obj:
        return full_matrix_algebra(int(obj["full_dim"]))
    if not isinstance(obj, list):
        raise InputFormatError("algebra must be {'full_dim': d} or a matrix list")
    return generate_algebra([matrix_from_json(m) for m in obj])


# ---------------------------------------------------------------------------
# groups, representations, nets
# ---------------------------------------------------------------------------


def group_from_json(obj) -> FiniteGroup:
    if isinstance(obj, str):
        g = builtin_group(obj)
    elif isinstance(obj, dict) and "name" in obj:
        g = builtin_group(str(obj["name"]))
    elif isinstance(obj, dict) and "table" in obj:
        g = FiniteGroup(np.asarray(obj["table"], dtype=int),
                        name=str(obj.get("label", "")))
    else:
        raise InputFormatError(
            "group must be a built-in name or {'order': n, 'table': [[...]]}"
        )
    g.validate()
    return g


def group_to_json(g: FiniteGroup) -> dict:
    return {"order": g.order, "table": [[int(x) for x in row] for row in g.table]}


def rep_from_json(obj, group: FiniteGroup | None = None) -> UnitaryRep:
    if "matrices" not in obj:
        raise InputFormatError("representation object needs 'matrices'")
    if group is None:
        if "group" not in obj:
            raise InputFormatError("representation object needs 'group'")
        group = group_from_json(obj["group"])
    rep = UnitaryRep(group, np.array([
        matrix_from_json(m) for m in obj["matrices"]
    ]))
    rep.validate()
    return rep


def rep_to_json(rep: UnitaryRep, include_group: bool = True) -> dict:
    out: dict = {}
    if include_group:
        name = rep.group.name
        out["group"] = name if name else group_to_json(rep.group)
    out["matrices"] = [matrix_to_json(m) for m in rep.matrices]
    return out


def net_from_json(obj) -> LatticeNet:
    try:
        sites = int(obj["sites"])
        onsite_dim = int(obj["onsite_dim"])
    except (KeyError, TypeError) as err:
        raise InputFormatError(f"bad net object: {err}") from err
    group = group_from_json(obj.get("group", "cyclic:2"))
    rep = rep_from_json({"matrices": obj["onsite_rep"]}, group=group)
    if rep.dim != onsite_dim:
        raise InputFormatError(
            f"onsite_rep dimension {rep.dim} != onsite_dim {onsite_dim}"
        )
    return LatticeNet(sites, rep)


def net_to_json(net: LatticeNet) -> dict:
    name = net.onsite_rep.group.name
    return {
        "sites": net.n_sites,
        "onsite_dim": net.onsite_dim,
        "group": name if name else group_to_json(net.onsite_rep.group),
        "onsite_rep": [matrix_to_json(m) for m in net.onsite_rep.matrices],
    }


# ---------------------------------------------------------------------------
# thermal objects and channels
# ---------------------------------------------------------------------------


def system_from_json(obj) -> HamiltonianSystem:
    if "hamiltonian" not in obj:
        raise InputFormatError("system object needs 'hamiltonian'")
    number = obj.get("number")
    return HamiltonianSystem(
        matrix_from_json(obj["hamiltonian"]),
        None if number is None else matrix_from_json(number),
    )


def system_to_json(sys: HamiltonianSystem) -> dict:
    out = {"hamiltonian": matrix_to_json(sys.hamiltonian)}
    if sys.number is not None:
        out["number"] = matrix_to_json(sys.number)
    return out


def grid_from_json(obj) -> ThermalGrid:
    pts = obj.get("points")
    if not isinstance(pts, list) or not pts:
        raise InputFormatError("grid object needs a nonempty 'points' list")
    points = []
    for p in pts:
        if "beta" not in p:
            raise InputFormatError("every grid point needs 'beta'")
        points.append((float(p["beta"]),
                       float(p["mu"]) if "mu" in p and p["mu"] is not None else None))
    return ThermalGrid(tuple(points))


def grid_to_json(grid: ThermalGrid) -> dict:
    pts = []
    for beta, mu in grid.points:
        p = {"beta": beta}
        if mu is not None:
            p["mu"] = mu
        pts.append(p)
    return {"points": pts}


def probes_from_json(obj) -> list[tuple[str, np.ndarray]]:
    if not isinstance(obj, list):
        raise InputFormatError("probes must be a list of {'name','matrix'}")
    out = []
    for item in obj:
        if "name" not in item or "matrix" not in item:
            raise InputFormatError("each probe needs 'name' and 'matrix'")
        out.append((str(item["name"]), matrix_from_json(item["matrix"])))
    return out


def probes_to_json(probes) -> list:
    return [{"name": n, "matrix": matrix_to_json(m)} for n, m in probes]


def measured_from_json(obj) -> dict[str, float]:
    vals = obj.get("values")
    if not isinstance(vals, dict):
        raise InputFormatError("measured data needs a 'values' mapping")
    return {str(k): float(v) for k, v in vals.items()}


def hierarchy_from_json(obj) -> ObservableHierarchy:
    levels = obj.get("levels")
    if not isinstance(levels, list):
        raise InputFormatError("hierarchy object needs a 'levels' list")
    parsed = []
    for lv in levels:
        if "name" not in lv or "probes" not in lv:
            raise InputFormatError("each level needs 'name' and 'probes'")
        parsed.append((str(lv["name"]), tuple(probes_from_json(lv["probes"]))))
    h = ObservableHierarchy(tuple(parsed))
    h.validate_nesting()
    return h


def hierarchy_to_json(h: ObservableHierarchy) -> dict:
    return {"levels": [
        {"name": name, "probes": probes_to_json(probes)}
        for name, probes in h.levels
    ]}


def _label_to_json(label):
    if isinstance(label, tuple):
        return [float(x) for x in label]
    return label


def _label_from_json(obj):
    if isinstance(obj, list):
        return tuple(float(x) for x in obj)
    return str(obj)


def channel_from_json(obj) -> ClassicalQuantumChannel:
    space_obj = obj.get("space")
    fibres = obj.get("fibres")
    if not isinstance(space_obj, dict) or not isinstance(fibres, list):
        raise InputFormatError("channel object needs 'space' and 'fibres'")
    labels = tuple(_label_from_json(l) for l in space_obj.get("labels", []))
    names = space_obj.get("coord_names")
    space = ClassifyingSpace(labels,
                             None if names is None else tuple(names))
    return ClassicalQuantumChannel(
        space, tuple(state_from_json(s) for s in fibres)
    )


def channel_to_json(chan: ClassicalQuantumChannel) -> dict:
    space: dict = {"labels": [_label_to_json(l) for l in chan.space.labels]}
    if chan.space.coord_names is not None:
        space["coord_names"] = list(chan.space.coord_names)
    return {"space": space, "fibres": [state_to_json(s) for s in chan.fibre_states]}


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as err:
        raise InputFormatError(
            f"{path}: malformed JSON at line {err.lineno}, column {err.colno}: "
            f"{err.msg}"
        ) from err
    except OSError as err:
        raise InputFormatError(f"{path}: {err.strerror}") from err
