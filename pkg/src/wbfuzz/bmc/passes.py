"""Formula-level passes: constant folding and cone-of-influence slicing."""
from __future__ import annotations

from dataclasses import replace

from ..sat.terms import TermBuilder, support
from .encode import Instance, NondetSymbol, SsaFormula


def constant_fold(f: SsaFormula) -> SsaFormula:
    """Rebuild ``f`` through a simplifying builder.

    Constants are evaluated and propagated through every definition;
    targets that fold to false are recorded in ``unsat_goals``.
    """
    if f.folded:
        return f
    tb = TermBuilder(simplify=True)
    memo: dict = {}

    def fold(t):
        return tb.rebuild(t, memo)

    defs = [(name, fold(t)) for name, t in f.defs]
    nondet = [replace(s, guard=fold(s.guard)) for s in f.nondet]
    instances = {g: [Instance(i.goal, fold(i.guard), i.horizon) for i in insts]
                 for g, insts in f.instances.items()}
    targets = {g: fold(t) for g, t in f.targets.items()}
    cuts = [c for c in (fold(t) for t in f.cut_guards) if c is not tb.false]
    unsat = {g for g, t in targets.items() if t is tb.false}
    return SsaFormula(tb, defs, nondet, instances, targets, cuts, f.k, unsat, folded=True)


def slice_formula(f: SsaFormula, goal: int) -> SsaFormula:
    """Keep only the definitions in the cone of influence of ``goal``'s target.

    Every nondet symbol stays listed; those outside the cone are flagged
    ``sliced`` and later take the value 0.
    """
    target = f.target(goal)
    cone = support([target])
    defs = [(name, t) for name, t in f.defs if t.id in cone]
    terms = f.builder.terms
    used = {terms[i].val for i in cone if terms[i].op == "sym"}
    nondet = [NondetSymbol(s.index, s.type, s.guard, s.line, s.index not in used)
              for s in f.nondet]
    return SsaFormula(f.builder, defs, nondet, f.instances, {goal: target}, f.cut_guards, f.k,
                      f.unsat_goals & {goal}, folded=f.folded, sliced_for=goal)
