"""JSON state files.

::

    {"dims": [2, 2, 2],
     "entries": [{"ket": "001", "re": 1.0, "im": 0.0}, ...],
     "normalize": true}

``ket`` holds one 0-based digit per subsystem, so digit ``d`` is basis
label ``d + 1``. Local dimensions are capped at 10. Unknown fields are
rejected.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .errors import StateFileError, ValidationError
from .state import PureState, check_dims, make_state, split_index

MAX_LOCAL_DIM = 10
_TOP_FIELDS = {"dims", "entries", "normalize"}
_ENTRY_FIELDS = {"ket", "re", "im"}


def parse_ket(ket: str, dims) -> tuple[int, ...]:
    """1-based labels for a 0-based digit string."""
    if not isinstance(ket, str) or len(ket) != len(dims) or not ket.isdigit():
        raise StateFileError(f"ket {ket!r} must be {len(dims)} decimal digits")
    labels = tuple(int(d) + 1 for d in ket)
    for d, n in zip(labels, dims):
        if d > n:
            raise StateFileError(f"ket {ket!r} has digit {d - 1} for a subsystem of dimension {n}")
    return labels


def format_ket(labels) -> str:
    return "".join(str(k - 1) for k in labels)


def state_from_dict(doc: Any) -> PureState:
    if not isinstance(doc, dict):
        raise StateFileError("state document must be a JSON object")
    unknown = set(doc) - _TOP_FIELDS
    if unknown:
        raise StateFileError(f"unknown fields {sorted(unknown)}")
    if "dims" not in doc or "entries" not in doc:
        raise StateFileError("state document needs 'dims' and 'entries'")
    raw_dims = doc["dims"]
    if not isinstance(raw_dims, list) or not all(isinstance(n, int) and not isinstance(n, bool) for n in raw_dims):
        raise StateFileError("'dims' must be a list of integers")
    dims = check_dims(raw_dims)
    if max(dims) > MAX_LOCAL_DIM:
        raise StateFileError(f"local dimensions above {MAX_LOCAL_DIM} are not supported")
    normalize = doc.get("normalize", True)
    if not isinstance(normalize, bool):
        raise StateFileError("'normalize' must be a boolean")
    if not isinstance(doc["entries"], list):
        raise StateFileError("'entries' must be a list")

    entries = []
    for entry in doc["entries"]:
        if not isinstance(entry, dict):
            raise StateFileError("each entry must be an object")
        unknown = set(entry) - _ENTRY_FIELDS
        if unknown:
            raise StateFileError(f"unknown entry fields {sorted(unknown)}")
        if "ket" not in entry:
            raise StateFileError("entry is missing 'ket'")
        re, im = entry.get("re", 0.0), entry.get("im", 0.0)
        if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in (re, im)):
            raise StateFileError("'re' and 'im' must be numbers")
        entries.append((parse_ket(entry["ket"], dims), complex(re, im)))

    if not normalize:
        norm = np.sqrt(sum(abs(a) ** 2 for _, a in entries))
        if abs(norm - 1.0) > 1e-9:
            raise StateFileError(f"'normalize' is false but the state norm is {norm!r}")
    return make_state(dims, entries)


def state_to_dict(state: PureState) -> dict:
    entries = []
    for index, amp in enumerate(state.amplitudes, start=1):
        if amp != 0:
            entries.append(
                {
                    "ket": format_ket(split_index(state.dims, index)),
                    "re": float(amp.real),
                    "im": float(amp.imag),
                }
            )
    return {"dims": list(state.dims), "entries": entries, "normalize": True}


def load_state(path: str | Path) -> PureState:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise StateFileError(f"cannot read state file {path}: {exc}") from exc
    return state_from_dict(doc)


def dump_state(state: PureState, path: str | Path) -> None:
    if max(state.dims) > MAX_LOCAL_DIM:
        raise ValidationError(f"local dimensions above {MAX_LOCAL_DIM} cannot be written")
    Path(path).write_text(json.dumps(state_to_dict(state), indent=2) + "\n")
