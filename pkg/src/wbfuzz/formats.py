"""Exchange formats: coverage properties, testcase and metadata XML, graphml witnesses."""
from __future__ import annotations

import hashlib
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Iterable, Optional
from xml.sax.saxutils import escape

from .instrument import COVER_BRANCHES, COVER_ERROR

XML_DECL = '<?xml version="1.0" encoding="UTF-8" standalone="no"?>'
DEFAULT_DTD_VERSION = "1.1"


class UnrecognizedProperty(ValueError):
    pass


class MalformedTestcase(ValueError):
    pass


# ------------------------------------------------------------------ properties


@dataclass(frozen=True)
class CoverSpec:
    mode: str
    entry: str = "main"
    error_function: Optional[str] = None

    def text(self) -> str:
        if self.mode == COVER_ERROR:
            return f"COVER( init({self.entry}()), FQL(COVER EDGES(@CALL({self.error_function}))) )"
        return f"COVER( init({self.entry}()), FQL(COVER EDGES(@DECISIONEDGE)) )"


_IDENT = r"([A-Za-z_][A-Za-z_0-9]*)"
_ERROR_RE = re.compile(rf"COVER\(init\({_IDENT}\(\)\),FQL\(COVEREDGES\(@CALL\({_IDENT}\)\)\)\)")
_BRANCH_RE = re.compile(rf"COVER\(init\({_IDENT}\(\)\),FQL\(COVEREDGES\(@DECISIONEDGE\)\)\)")


def parse_property(text: str) -> CoverSpec:
    """Recognize the two coverage properties, ignoring all whitespace."""
    squeezed = re.sub(r"\s+", "", text)
    m = _ERROR_RE.fullmatch(squeezed)
    if m:
        return CoverSpec(COVER_ERROR, m.group(1), m.group(2))
    m = _BRANCH_RE.fullmatch(squeezed)
    if m:
        return CoverSpec(COVER_BRANCHES, m.group(1))
    raise UnrecognizedProperty(f"unrecognized test property: {text.strip()!r}")


# ------------------------------------------------------------------- testcases


def _doctype(root: str, name: str, version: str) -> str:
    return (f'<!DOCTYPE {root} PUBLIC "+//IDN sosy-lab.org//DTD test-format {name} {version}//EN" '
            f'"https://sosy-lab.org/test-format/{name}-{version}.dtd">')


def _value(item) -> int:
    return item[1] if isinstance(item, tuple) else int(item)


def emit_testcase(tape: Iterable, covers_error: bool = False,
                  dtd_version: str = DEFAULT_DTD_VERSION) -> str:
    """One ``<input>`` per tape value, in consumption order."""
    values = [_value(x) for x in tape]
    attr = ' coversError="true"' if covers_error else ""
    lines = [XML_DECL, _doctype("testcase", "testcase", dtd_version)]
    if not values:
        lines.append(f"<testcase{attr}/>")
    else:
        lines.append(f"<testcase{attr}>")
        lines.extend(f"  <input>{v}</input>" for v in values)
        lines.append("</testcase>")
    return "\n".join(lines) + "\n"


_INT_RE = re.compile(r"[+-]?(0[xX][0-9a-fA-F]+|[0-9]+)[uUlL]*")


def _parse_int(text: str) -> int:
    s = text.strip()
    if not _INT_RE.fullmatch(s):
        raise MalformedTestcase(f"input is not an integer: {text!r}")
    s = s.rstrip("uUlL")
    return int(s, 0) if s.lstrip("+-")[:2].lower() == "0x" else int(s, 10)


def read_testcase(text: str) -> tuple:
    """Return ``(values, covers_error)`` of a testcase document."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as e:
        raise MalformedTestcase(f"not well-formed XML: {e}") from None
    if root.tag != "testcase":
        raise MalformedTestcase(f"root element is <{root.tag}>, expected <testcase>")
    flag = root.get("coversError", "false")
    if flag not in ("true", "false"):
        raise MalformedTestcase(f"bad coversError value {flag!r}")
    values = []
    for child in root:
        if child.tag != "input":
            raise MalformedTestcase(f"unexpected element <{child.tag}>")
        if len(child):
            raise MalformedTestcase("<input> must not have child elements")
        values.append(_parse_int(child.text or ""))
    return tuple(values), flag == "true"


def parse_testcase(text: str) -> tuple:
    """Decimal input sequence of a testcase; typing happens at replay."""
    return read_testcase(text)[0]


# -------------------------------------------------------------------- metadata


@dataclass(frozen=True)
class SuiteMetadata:
    specification: str
    programfile: str
    programhash: str
    entryfunction: str = "main"
    architecture: int = 32
    creationtime: str = "1970-01-01T00:00:00Z"
    producer: str = "wbfuzz"
    sourcecodelang: str = "C"

    def __post_init__(self):
        if self.architecture not in (32, 64):
            raise ValueError("architecture must be 32 or 64")


def sha256_file(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def emit_metadata(md: SuiteMetadata, dtd_version: str = DEFAULT_DTD_VERSION) -> str:
    fields = [("sourcecodelang", md.sourcecodelang), ("producer", md.producer),
              ("specification", md.specification), ("programfile", md.programfile),
              ("programhash", md.programhash), ("entryfunction", md.entryfunction),
              ("architecture", f"{md.architecture}bit"), ("creationtime", md.creationtime)]
    lines = [XML_DECL, _doctype("test-metadata", "test-metadata", dtd_version), "<test-metadata>"]
    lines.extend(f"  <{k}>{escape(v)}</{k}>" for k, v in fields)
    lines.append("</test-metadata>")
    return "\n".join(lines) + "\n"


def parse_metadata(text: str) -> SuiteMetadata:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as e:
        raise ValueError(f"metadata is not well-formed XML: {e}") from None
    if root.tag != "test-metadata":
        raise ValueError(f"root element is <{root.tag}>, expected <test-metadata>")
    f = {child.tag: (child.text or "") for child in root}
    try:
        arch = int(f.get("architecture", "32bit").removesuffix("bit"))
        return SuiteMetadata(specification=f.get("specification", ""),
                             programfile=f.get("programfile", ""),
                             programhash=f.get("programhash", ""),
                             entryfunction=f.get("entryfunction", "main"),
                             architecture=arch,
                             creationtime=f.get("creationtime", ""),
                             producer=f.get("producer", ""),
                             sourcecodelang=f.get("sourcecodelang", ""))
    except ValueError as e:
        raise ValueError(f"bad metadata: {e}") from None


# --------------------------------------------------------------------- witness

_GRAPH_KEYS = ("witness-type", "sourcecodelang", "producer", "specification", "programfile",
               "programhash", "architecture", "creationtime")
_CONTROL = {"then": "condition-true", "enter": "condition-true",
            "else": "condition-false", "exit": "condition-false"}


def witness_events(trace) -> list:
    """Decisions and nondet reads of ``trace`` merged in execution order.

    Each event is ``(line, control, assumption)``; exactly one of the last
    two is set.
    """
    events = []
    marks = list(trace.input_marks)
    j = 0
    for i, (_, arm, line) in enumerate(trace.decisions):
        while j < len(marks) and marks[j] <= i:
            events.append((trace.input_lines[j], None, f"\\result == {trace.input_values[j]};"))
            j += 1
        control = _CONTROL.get(arm) if isinstance(arm, str) else None
        if control is None:
            control = "condition-true" if arm != "default" else "condition-false"
        events.append((line, control, None))
    while j < len(marks):
        events.append((trace.input_lines[j], None, f"\\result == {trace.input_values[j]};"))
        j += 1
    return events


def emit_witness(trace, md: Optional[SuiteMetadata] = None) -> str:
    """Violation witness following ``trace``: a chain from the entry node.

    The final node is flagged as a violation only if the trace reached the
    error function.
    """
    out = [XML_DECL,
           '<graphml xmlns="http://graphml.graphdrawing.org/xmlns" '
           'xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance">']
    for k in _GRAPH_KEYS:
        out.append(f'  <key id="{k}" attr.name="{k}" attr.type="string" for="graph"/>')
    out.append('  <key id="entry" attr.name="isEntryNode" attr.type="boolean" for="node">'
               '<default>false</default></key>')
    out.append('  <key id="violation" attr.name="isViolationNode" attr.type="boolean" for="node">'
               '<default>false</default></key>')
    out.append('  <key id="startline" attr.name="startline" attr.type="int" for="edge"/>')
    out.append('  <key id="control" attr.name="control" attr.type="string" for="edge"/>')
    out.append('  <key id="assumption" attr.name="assumption" attr.type="string" for="edge"/>')
    out.append('  <graph edgedefault="directed">')
    graph_data = {"witness-type": "violation_witness"}
    if md is not None:
        graph_data.update(sourcecodelang=md.sourcecodelang, producer=md.producer,
                          specification=md.specification, programfile=md.programfile,
                          programhash=md.programhash, architecture=f"{md.architecture}bit",
                          creationtime=md.creationtime)
    for k in _GRAPH_KEYS:
        if k in graph_data:
            out.append(f'    <data key="{k}">{escape(graph_data[k])}</data>')
    events = witness_events(trace) if trace.error_reached else []
    out.append('    <node id="N0">')
    out.append('      <data key="entry">true</data>')
    out.append('    </node>')
    if trace.error_reached and not events:
        # an unconditional path: one plain edge into the violation node
        out.append('    <node id="N1">')
        out.append('      <data key="violation">true</data>')
        out.append('    </node>')
        out.append('    <edge source="N0" target="N1"/>')
    for n, (line, control, assumption) in enumerate(events, start=1):
        last = n == len(events)
        if last:
            out.append(f'    <node id="N{n}">')
            out.append('      <data key="violation">true</data>')
            out.append('    </node>')
        else:
            out.append(f'    <node id="N{n}"/>')
        out.append(f'    <edge source="N{n - 1}" target="N{n}">')
        out.append(f'      <data key="startline">{line}</data>')
        if control is not None:
            out.append(f'      <data key="control">{control}</data>')
        if assumption is not None:
            out.append(f'      <data key="assumption">{escape(assumption)}</data>')
        out.append('    </edge>')
    out.append('  </graph>')
    out.append('</graphml>')
    return "\n".join(out) + "\n"


def parse_witness(text: str) -> dict:
    """Nodes and edges of a witness, for checks: ``{"nodes": [...], "edges": [...]}``."""
    ns = {"g": "http://graphml.graphdrawing.org/xmlns"}
    root = ET.fromstring(text)
    graph = root.find("g:graph", ns)
    nodes, edges = [], []
    for node in graph.findall("g:node", ns):
        data = {d.get("key"): d.text for d in node.findall("g:data", ns)}
        nodes.append({"id": node.get("id"), "entry": data.get("entry") == "true",
                      "violation": data.get("violation") == "true"})
    for edge in graph.findall("g:edge", ns):
        data = {d.get("key"): d.text for d in edge.findall("g:data", ns)}
        edges.append({"source": edge.get("source"), "target": edge.get("target"), **data})
    return {"nodes": nodes, "edges": edges}
