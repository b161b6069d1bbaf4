"""CNF container and DIMACS serialisation."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Cnf:
    var_count: int
    clauses: list  # lists of non-zero DIMACS literals
    bit_map: dict = field(default_factory=dict)  # symbol -> [var ids], LSB first

    def check(self, assignment) -> bool:
        """True if ``assignment`` (indexable by var id, truthy = true) satisfies every clause."""
        for c in self.clauses:
            for lit in c:
                v = assignment[lit if lit > 0 else -lit]
                if (lit > 0) == bool(v):
                    break
            else:
                return False
        return True


def to_dimacs(cnf: Cnf, comments: tuple = ()) -> str:
    out = [f"c {line}" for line in comments]
    out.append(f"p cnf {cnf.var_count} {len(cnf.clauses)}")
    out.extend(" ".join(map(str, c)) + " 0" for c in cnf.clauses)
    return "\n".join(out) + "\n"


def parse_dimacs(text: str) -> Cnf:
    var_count = None
    clauses: list = []
    current: list = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad problem line: {line!r}")
            var_count = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(current)
    if var_count is None:
        raise ValueError("missing 'p cnf' header")
    return Cnf(var_count, clauses)
