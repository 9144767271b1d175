"""JSON and DOT export of CAs and DCAs.

Both JSON formats reload to an equal object, and exporting a reloaded object
reproduces the original text byte for byte.
"""
from __future__ import annotations

import json
from typing import Union

from .alphabet import format_class, parse_class
from .automaton import CountingAutomaton, Dca, DcaTransition, LabelSphere, Transition
from .logic import format_atom, parse_atom, parse_term


def _atoms(texts, bounds) -> tuple:
    out = []
    for text in texts:
        a = parse_atom(text, bounds)
        if a is False:
            return None
        if a is not True:
            out.append(a)
    return tuple(out)


def _dnf(conjs, bounds) -> tuple:
    out = []
    for conj in conjs:
        c = _atoms(conj, bounds)
        if c is not None:
            out.append(c)
    return tuple(out)


def ca_to_dict(a: CountingAutomaton) -> dict:
    return {
        "alphabetSize": a.alphabet_size,
        "states": list(a.states),
        "counters": [{"name": c, "max": m} for c, m in a.counters.items()],
        "initial": [{"state": q, "counters": dict(vals)} for q, vals in a.initial],
        "final": [{"state": q, "guard": [[format_atom(x) for x in conj] for conj in dnf]}
                  for q, dnf in a.final.items()],
        "transitions": [{
            "src": t.src,
            "symClass": format_class(t.sym),
            "guard": [format_atom(x) for x in t.guard],
            "assign": {c: str(term) for c, term in t.assign},
            "dst": t.dst,
        } for t in a.transitions],
    }


def ca_from_dict(data: dict) -> CountingAutomaton:
    """Build a CA from the JSON schema; ``c=max`` style atoms are expanded
    with the bound of the counter they mention."""
    size = data.get("alphabetSize", 256)
    counters = {c["name"]: int(c["max"]) for c in data.get("counters", [])}
    initial = []
    for entry in data.get("initial", []):
        vals = {c: 0 for c in counters}
        vals.update(entry.get("counters", {}))
        initial.append((entry["state"], tuple(sorted(vals.items()))))
    final = {}
    for entry in data.get("final", []):
        final[entry["state"]] = _dnf(entry.get("guard", [[]]), counters)
    transitions = []
    for t in data.get("transitions", []):
        guard = _atoms(t.get("guard", []), counters)
        if guard is None:
            continue
        assign = tuple((c, parse_term(v, counters.get(c))) for c, v in t.get("assign", {}).items())
        transitions.append(Transition(t["src"], parse_class(t["symClass"], size), guard, assign, t["dst"]))
    return CountingAutomaton(tuple(data["states"]), counters, tuple(initial), final,
                             tuple(transitions), size)


def dca_to_dict(d: Dca) -> dict:
    return {
        "method": d.method,
        "alphabetSize": d.alphabet_size,
        "params": list(d.params),
        "states": [{"label": s.label(), "empty": s.is_empty()} for s in d.spheres],
        "initial": d.initial,
        "initialValuation": {p: v for p, v in sorted(d.initial_valuation.items())},
        "final": [{"state": i, "guard": [[format_atom(x) for x in conj] for conj in dnf]}
                  for i, dnf in sorted(d.final.items())],
        "transitions": [{
            "src": t.src,
            "symClass": format_class(t.sym),
            "guard": [format_atom(x) for x in t.guard],
            "assign": {p: str(term) for p, term in t.assign},
            "dst": t.dst,
        } for t in d.transitions],
    }


def dca_from_dict(data: dict) -> Dca:
    size = data.get("alphabetSize", 256)
    spheres = [LabelSphere(s["label"], bool(s.get("empty"))) for s in data["states"]]
    final = {int(e["state"]): _dnf(e["guard"], {}) for e in data.get("final", [])}
    transitions = []
    for t in data.get("transitions", []):
        guard = _atoms(t.get("guard", []), {})
        if guard is None:
            continue
        assign = tuple((p, parse_term(v)) for p, v in t.get("assign", {}).items())
        transitions.append(DcaTransition(int(t["src"]), parse_class(t["symClass"], size), guard,
                                         assign, int(t["dst"])))
    return Dca(spheres, tuple(data.get("params", [])), int(data["initial"]),
               dict(data.get("initialValuation", {})), transitions, final, size,
               data.get("method", ""))


def dumps(obj: Union[CountingAutomaton, Dca]) -> str:
    data = ca_to_dict(obj) if isinstance(obj, CountingAutomaton) else dca_to_dict(obj)
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def loads(text: str) -> Union[CountingAutomaton, Dca]:
    """Load either format; DCA files are recognised by their ``params`` key."""
    data = json.loads(text)
    return dca_from_dict(data) if "params" in data else ca_from_dict(data)


def _quote(text: str) -> str:
    text = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return '"' + text + '"'


def _edge_label(sym, guard, assign) -> str:
    text = format_class(sym)
    if guard:
        text += ", " + ", ".join(format_atom(x) for x in guard)
    if assign:
        text += " / " + ", ".join(f"{v}'={t}" for v, t in assign)
    return text


def to_dot(obj: Union[CountingAutomaton, Dca]) -> str:
    lines = ["digraph automaton {", "  rankdir=LR;", '  node [shape=ellipse];',
             '  start [shape=point];']
    if isinstance(obj, CountingAutomaton):
        for q in obj.states:
            label = q
            if q in obj.final:
                dnf = obj.final[q]
                cond = " | ".join(" & ".join(format_atom(x) for x in c) or "true" for c in dnf)
                if cond != "true":
                    label += "\n" + cond
            shape = "doublecircle" if q in obj.final else "circle"
            lines.append(f"  {_quote(q)} [label={_quote(label)}, shape={shape}];")
        for q, vals in obj.initial:
            text = ", ".join(f"{c}={v}" for c, v in vals)
            lines.append(f"  start -> {_quote(q)} [label={_quote(text)}];")
        for t in obj.transitions:
            lines.append(f"  {_quote(t.src)} -> {_quote(t.dst)} "
                         f"[label={_quote(_edge_label(t.sym, t.guard, t.assign))}];")
    else:
        for i, s in enumerate(obj.spheres):
            label = s.label()
            shape = "ellipse"
            if i in obj.final:
                cond = " | ".join(" & ".join(format_atom(x) for x in c) or "true" for c in obj.final[i])
                label += "\n" + cond
                shape = "doubleoctagon"
            lines.append(f"  s{i} [label={_quote(label)}, shape={shape}];")
        init = ", ".join(f"{p}={v}" for p, v in sorted(obj.initial_valuation.items()))
        lines.append(f"  start -> s{obj.initial} [label={_quote(init)}];")
        for t in obj.transitions:
            lines.append(f"  s{t.src} -> s{t.dst} [label={_quote(_edge_label(t.sym, t.guard, t.assign))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
