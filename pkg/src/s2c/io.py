"""JSON machine documents.

A document looks like::

    {
      "format_version": "1",
      "input_alphabet": ["a", "b"],
      "output_alphabet": ["a", "b"],
      "states": ["q"],
      "init": [{"state": "q", "left": "", "right": ""}],
      "final": [{"state": "q", "left": "", "right": ""}],
      "transitions": [{"from": "q", "input": "a", "left": "a", "right": "", "to": "q"}]
    }

Unknown fields are rejected. Errors carry a JSON path and, when known, the
line of the offending value.
"""
from __future__ import annotations

import json
from json import decoder, scanner

from .context import Context
from .machine import Machine

FORMAT_VERSION = "1"

_TOP = ("format_version", "input_alphabet", "output_alphabet", "states", "init", "final",
        "transitions")
_ASSIGN = ("state", "left", "right")
_TRANS = ("from", "input", "left", "right", "to")


class MachineFormatError(ValueError):
    def __init__(self, message: str, path: str = "$", line: int | None = None):
        self.message, self.path, self.line = message, path, line
        where = f"{path}" + (f" (line {line})" if line else "")
        super().__init__(f"{where}: {message}")


# JSON values that remember the line they started on.
class _Dict(dict):
    line = None


class _List(list):
    line = None


class _LineDecoder(json.JSONDecoder):
    def __init__(self):
        super().__init__()

        def line_of(s, idx):
            return s.count("\n", 0, idx) + 1

        def parse_object(s_and_end, strict, scan_once, object_hook, object_pairs_hook,
                         memo=None):
            s, end = s_and_end
            pairs, new_end = decoder.JSONObject(s_and_end, strict, scan_once, None, list, memo)
            obj = _Dict()
            for k, v in pairs:
                if k in obj:
                    raise MachineFormatError(f"duplicate key {k!r}", "$", line_of(s, end))
                obj[k] = v
            obj.line = line_of(s, end - 1)
            return obj, new_end

        def parse_array(s_and_end, scan_once):
            s, end = s_and_end
            values, new_end = decoder.JSONArray(s_and_end, scan_once)
            arr = _List(values)
            arr.line = line_of(s, end - 1)
            return arr, new_end

        self.parse_object = parse_object
        self.parse_array = parse_array
        self.scan_once = scanner.py_make_scanner(self)


def _line(v, parent=None):
    return getattr(v, "line", None) or getattr(parent, "line", None)


def _expect_keys(obj, keys, path):
    if not isinstance(obj, dict):
        raise MachineFormatError("expected an object", path, _line(obj))
    extra = sorted(set(obj) - set(keys))
    if extra:
        raise MachineFormatError(f"unknown field(s) {extra}", path, _line(obj))
    missing = [k for k in keys if k not in obj]
    if missing:
        raise MachineFormatError(f"missing field(s) {missing}", path, _line(obj))


def _expect_str(v, path, parent):
    if not isinstance(v, str):
        raise MachineFormatError("expected a string", path, _line(v, parent))
    return v


def _expect_list(v, path, parent):
    if not isinstance(v, list):
        raise MachineFormatError("expected an array", path, _line(v, parent))
    return v


def from_document(doc) -> Machine:
    _expect_keys(doc, _TOP, "$")
    if doc["format_version"] != FORMAT_VERSION:
        raise MachineFormatError(f"unsupported format_version {doc['format_version']!r}",
                                 "$.format_version", _line(doc))
    alph = {}
    for key in ("input_alphabet", "output_alphabet"):
        syms = _expect_list(doc[key], f"$.{key}", doc)
        for i, a in enumerate(syms):
            _expect_str(a, f"$.{key}[{i}]", syms)
            if len(a) != 1:
                raise MachineFormatError("symbols must be single characters",
                                         f"$.{key}[{i}]", _line(syms))
        alph[key] = set(syms)
    states = _expect_list(doc["states"], "$.states", doc)
    for i, q in enumerate(states):
        _expect_str(q, f"$.states[{i}]", states)
    if len(set(states)) != len(states):
        raise MachineFormatError("duplicate state ids", "$.states", _line(states))
    known = set(states)

    def word(v, path, parent):
        _expect_str(v, path, parent)
        bad = sorted(set(v) - alph["output_alphabet"])
        if bad:
            raise MachineFormatError(f"undeclared output symbols {bad}", path, _line(parent))
        return v

    def state(v, path, parent):
        _expect_str(v, path, parent)
        if v not in known:
            raise MachineFormatError(f"undeclared state {v!r}", path, _line(parent))
        return v

    fns = {}
    for key in ("init", "final"):
        items = _expect_list(doc[key], f"$.{key}", doc)
        fn = {}
        for i, it in enumerate(items):
            path = f"$.{key}[{i}]"
            _expect_keys(it, _ASSIGN, path)
            q = state(it["state"], f"{path}.state", it)
            if q in fn:
                raise MachineFormatError(f"state {q!r} assigned twice", path, _line(it))
            fn[q] = Context(word(it["left"], f"{path}.left", it),
                            word(it["right"], f"{path}.right", it))
        fns[key] = fn
    items = _expect_list(doc["transitions"], "$.transitions", doc)
    trs = []
    for i, it in enumerate(items):
        path = f"$.transitions[{i}]"
        _expect_keys(it, _TRANS, path)
        a = _expect_str(it["input"], f"{path}.input", it)
        if a not in alph["input_alphabet"]:
            raise MachineFormatError(f"undeclared input symbol {a!r}", f"{path}.input", _line(it))
        trs.append((state(it["from"], f"{path}.from", it), a,
                    Context(word(it["left"], f"{path}.left", it),
                            word(it["right"], f"{path}.right", it)),
                    state(it["to"], f"{path}.to", it)))
    return Machine(tuple(doc["input_alphabet"]), tuple(doc["output_alphabet"]), tuple(states),
                   fns["init"], fns["final"], tuple(trs))


def loads(text: str) -> Machine:
    try:
        doc = _LineDecoder().decode(text)
    except json.JSONDecodeError as exc:
        raise MachineFormatError(exc.msg, "$", exc.lineno) from None
    return from_document(doc)


def load(path) -> Machine:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def to_document(m: Machine) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "input_alphabet": list(m.input_alphabet),
        "output_alphabet": list(m.output_alphabet),
        "states": list(m.states),
        "init": [{"state": q, "left": c.left, "right": c.right} for q, c in m.init.items()],
        "final": [{"state": q, "left": c.left, "right": c.right} for q, c in m.final.items()],
        "transitions": [
            {"from": t.src, "input": t.symbol, "left": t.out.left, "right": t.out.right,
             "to": t.dst}
            for t in m.transitions
        ],
    }


def dumps(m: Machine) -> str:
    return json.dumps(to_document(m), indent=2, ensure_ascii=False) + "\n"


def dump(m: Machine, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(m))
