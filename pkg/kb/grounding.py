"""Expand a schematic domain over its instances into a ground ``Domain``.

Sorts form a tree (``subsort`` edges); a variable ranges over the instances of
its sort and every sub-sort. Laws are grounded once per well-sorted binding of
all their variables, so a variable that occurs only in a body behaves
existentially. Bindings whose guards or static atoms fail, or that produce a
term outside the ground fluent/action sets, are dropped.
"""

import itertools
import logging
from collections import defaultdict
from typing import Iterable, Iterator

import networkx as nx

from config.constants import (
    ACTIVE_GOAL,
    ACTIVITY_ACTIONS,
    GOAL_ACTIONS,
    MENTAL_ACTIONS,
    REPLANNED,
    ActionKind,
    FluentKind,
    Layer,
)
from errors import DomainError
from kb.domain import (
    ActionDecl,
    Activity,
    ChoiceLaw,
    Domain,
    DynamicLaw,
    Executability,
    FluentDecl,
    Literal,
    SelectionRule,
    StateConstraint,
)
from kb.parser import Guard, SchemaActivity, SchematicDomain
from kb.terms import Term

logger = logging.getLogger(__name__)

Binding = dict[str, Term]


class Grounder:
    """Single-use helper holding the sort index while a domain is grounded."""

    def __init__(self, schema: SchematicDomain, extra_instances: dict[str, str] | None = None):
        self.schema = schema
        self.instances = dict(schema.instances)
        for name, sort in (extra_instances or {}).items():
            if name in self.instances:
                raise DomainError(f"Duplicate instance {name}", source=schema.source)
            self.instances[name] = sort

        self.sort_tree = self._sort_tree()
        self._members: dict[str, list[Term]] = {}
        self.statics: dict[str, set[tuple[Term, ...]]] = defaultdict(set)
        self.fluents: frozenset[Term] = frozenset()
        self.actions: frozenset[Term] = frozenset()

    def error(self, message: str, line: int | None = None) -> DomainError:
        return self.schema.error(message, line)

    # -- sorts ----------------------------------------------------------------

    def _sort_tree(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        for sort, parent in self.schema.sorts.items():
            graph.add_node(sort)
            if parent is not None:
                if parent not in self.schema.sorts:
                    raise self.error(f"Unknown parent sort {parent} of {sort}",
                                     self.schema.lines.get(sort))
                graph.add_edge(parent, sort)
        if not nx.is_directed_acyclic_graph(graph):
            cycle = nx.find_cycle(graph)
            raise self.error(f"Cyclic sort hierarchy: {' -> '.join(a for a, _ in cycle)}")

        for name, sort in self.instances.items():
            if sort not in graph:
                raise self.error(f"Instance {name} declared under unknown sort {sort}",
                                 self.schema.lines.get(name))
        for name, sort in self.schema.variables.items():
            if sort not in graph:
                raise self.error(f"Variable {name} declared under unknown sort {sort}")
        for sort in self.schema.required:
            if sort not in graph:
                raise self.error(f"Required sort {sort} is not declared")
        return graph

    def is_subsort(self, child: str, parent: str) -> bool:
        return child == parent or child in nx.descendants(self.sort_tree, parent)

    def compatible(self, a: str, b: str) -> bool:
        return self.is_subsort(a, b) or self.is_subsort(b, a)

    def members(self, sort: str) -> list[Term]:
        if sort not in self._members:
            sorts = {sort} | nx.descendants(self.sort_tree, sort)
            self._members[sort] = [Term(n) for n in sorted(self.instances) if self.instances[n] in sorts]
        return self._members[sort]

    def is_member(self, name: str, sort: str) -> bool:
        return name in self.instances and self.is_subsort(self.instances[name], sort)

    # -- schematic checks -----------------------------------------------------

    def check_args(self, term: Term, sorts: tuple[str, ...], line: int) -> None:
        if len(term.args) != len(sorts):
            raise self.error(f"{term.name} expects {len(sorts)} arguments, got {len(term.args)}", line)
        for arg, sort in zip(term.args, sorts):
            if arg.is_variable:
                var_sort = self.schema.variables.get(arg.name)
                if var_sort is None:
                    raise self.error(f"Undeclared variable {arg.name} in {term}", line)
                if not self.compatible(var_sort, sort):
                    raise self.error(f"Variable {arg.name} of sort {var_sort} cannot fill a {sort} slot of {term.name}", line)
            elif arg.args:
                raise self.error(f"Nested term {arg} not allowed in {term}", line)
            elif arg.name not in self.instances:
                raise self.error(f"Unknown instance {arg.name} in {term}", line)
            elif not self.is_member(arg.name, sort):
                raise self.error(f"{arg.name} is not of sort {sort} in {term}", line)

    def check_fluent(self, term: Term, line: int) -> FluentDecl:
        decl = self.schema.fluent_decls.get(term.name)
        if decl is None:
            raise self.error(f"Unknown fluent {term.name}", line)
        self.check_args(term, decl.sorts, line)
        return decl

    def check_action(self, term: Term, line: int) -> ActionDecl:
        decl = self.schema.action_decls.get(term.name)
        if decl is None:
            raise self.error(f"Unknown action {term.name}", line)
        self.check_args(term, decl.sorts, line)
        return decl

    def check_condition(self, cond, line: int) -> None:
        if isinstance(cond, Guard):
            for side in (cond.left, cond.right):
                if side.is_variable and side.name not in self.schema.variables:
                    raise self.error(f"Undeclared variable {side.name}", line)
            return
        if cond.fluent.name in self.static_names:
            if not cond.positive:
                raise self.error(f"Static atom {cond.fluent} cannot be negated", line)
            return
        self.check_fluent(cond.fluent, line)

    @property
    def static_names(self) -> set[str]:
        return {s.head.name for s in self.schema.statics}

    # -- bindings -------------------------------------------------------------

    def variables_of(self, terms: Iterable[Term], conditions: Iterable = ()) -> list[str]:
        names: list[str] = []
        for t in terms:
            names.extend(t.variables())
        for cond in conditions:
            if isinstance(cond, Guard):
                names.extend(v for side in (cond.left, cond.right) for v in side.variables())
            else:
                names.extend(cond.fluent.variables())
        return list(dict.fromkeys(names))

    def bindings(self, names: list[str], line: int) -> Iterator[Binding]:
        pools = []
        for name in names:
            sort = self.schema.variables.get(name)
            if sort is None:
                raise self.error(f"Undeclared variable {name}", line)
            pools.append(self.members(sort))
        for combo in itertools.product(*pools):
            yield dict(zip(names, combo))

    def ground_body(self, body, binding: Binding) -> tuple[Literal, ...] | None:
        """Substitute ``binding``; None when a guard, a static or well-sortedness fails."""
        literals = []
        for cond in body:
            if isinstance(cond, Guard):
                same = cond.left.substitute(binding) == cond.right.substitute(binding)
                if same != cond.equal:
                    return None
                continue
            atom = cond.fluent.substitute(binding)
            if atom.name in self.static_names:
                if atom.args not in self.statics.get(atom.name, ()):
                    return None
                continue
            if atom not in self.fluents:
                return None
            literals.append(Literal(atom, cond.positive))
        return tuple(dict.fromkeys(literals))

    # -- declarations ---------------------------------------------------------

    def ground_declarations(self) -> dict[Term, tuple[Term, ...]]:
        for name in MENTAL_ACTIONS | {ACTIVE_GOAL, REPLANNED}:
            if name in self.schema.action_decls or name in self.schema.fluent_decls:
                raise self.error(f"'{name}' is reserved for the theory of intentions",
                                 self.schema.lines.get(name))

        fluents = set()
        for decl in self.schema.fluent_decls.values():
            for sort in decl.sorts:
                if sort not in self.sort_tree:
                    raise self.error(f"Unknown sort {sort} in fluent {decl.name}", self.schema.lines.get(decl.name))
            if decl.functional is not None and not 1 <= decl.functional <= len(decl.sorts):
                raise self.error(f"functional={decl.functional} out of range for {decl.name}",
                                 self.schema.lines.get(decl.name))
            for combo in itertools.product(*(self.members(s) for s in decl.sorts)):
                fluents.add(Term(decl.name, combo))

        actions = set()
        actors: dict[Term, tuple[Term, ...]] = {}
        for decl in self.schema.action_decls.values():
            line = self.schema.lines.get(decl.name)
            for sort in decl.sorts:
                if sort not in self.sort_tree:
                    raise self.error(f"Unknown sort {sort} in action {decl.name}", line)
            if decl.kind == ActionKind.MENTAL:
                raise self.error(f"Mental actions are built in; {decl.name} cannot be declared", line)
            if decl.kind == ActionKind.AGENT and not decl.actors:
                raise self.error(f"Agent action {decl.name} needs actor=<positions>", line)
            if decl.kind == ActionKind.EXOGENOUS and decl.actors:
                raise self.error(f"Exogenous action {decl.name} cannot have actors", line)
            for pos in decl.actors:
                if not 1 <= pos <= len(decl.sorts):
                    raise self.error(f"actor={pos} out of range for {decl.name}", line)
            for combo in itertools.product(*(self.members(s) for s in decl.sorts)):
                action = Term(decl.name, combo)
                actions.add(action)
                actors[action] = tuple(dict.fromkeys(combo[p - 1] for p in decl.actors))

        self.fluents = frozenset(fluents)
        self.actions = frozenset(actions)
        logger.info("Grounded %d fluents and %d actions from %s",
                    len(fluents), len(actions), self.schema.source)
        return actors

    def ground_statics(self) -> None:
        for static in self.schema.statics:
            for arg in static.head.args:
                if not arg.is_variable:
                    raise self.error(f"Static head {static.head} must list variables only", static.line)
            for cond in static.body:
                self.check_condition(cond, static.line)
            names = self.variables_of([static.head], static.body)
            for binding in self.bindings(names, static.line):
                body = self.ground_body(static.body, binding)
                if body is None:
                    continue
                if body:
                    raise self.error("Static definitions may only use guards and other statics", static.line)
                self.statics[static.head.name].add(static.head.substitute(binding).args)

    # -- laws -----------------------------------------------------------------

    def ground_causes(self) -> list[DynamicLaw]:
        laws = []
        for law in self.schema.causes:
            triggers = [self._check_trigger(t, law.line) for t in law.triggers]
            for head in law.heads:
                decl = self.check_fluent(head.fluent, law.line)
                if decl.kind != FluentKind.INERTIAL:
                    raise self.error(f"Only inertial fluents can be caused, not {head.fluent.name}", law.line)
            for cond in law.body:
                self.check_condition(cond, law.line)

            names = self.variables_of(triggers + [h.fluent for h in law.heads], law.body)
            for binding in self.bindings(names, law.line):
                ground_triggers = tuple(sorted({t.substitute(binding) for t in triggers}))
                if not all(t in self.actions for t in ground_triggers):
                    continue
                body = self.ground_body(law.body, binding)
                if body is None:
                    continue
                for head in law.heads:
                    fluent = head.fluent.substitute(binding)
                    if fluent in self.fluents:
                        laws.append(DynamicLaw(ground_triggers, Literal(fluent, head.positive),
                                               body, law.defeasible))
        return list(dict.fromkeys(laws))

    def _check_trigger(self, term: Term, line: int) -> Term:
        self.check_action(term, line)
        return term

    def ground_definitions(self) -> list[StateConstraint]:
        laws = []
        for law in self.schema.definitions:
            decl = self.check_fluent(law.head, law.line)
            if decl.kind != FluentKind.DEFINED:
                raise self.error(f"{law.head.name} is not a defined fluent", law.line)
            for cond in law.body:
                self.check_condition(cond, law.line)
            for binding in self.bindings(self.variables_of([law.head], law.body), law.line):
                head = law.head.substitute(binding)
                body = self.ground_body(law.body, binding)
                if body is not None and head in self.fluents:
                    laws.append(StateConstraint(head, body))
        return list(dict.fromkeys(laws))

    def ground_impossible(self) -> list[Executability]:
        laws = []
        for law in self.schema.impossible:
            self.check_action(law.action, law.line)
            for cond in law.body:
                self.check_condition(cond, law.line)
            for binding in self.bindings(self.variables_of([law.action], law.body), law.line):
                action = law.action.substitute(binding)
                body = self.ground_body(law.body, binding)
                if body is not None and action in self.actions:
                    laws.append(Executability(action, body))
        return list(dict.fromkeys(laws))

    def ground_choices(self) -> list[ChoiceLaw]:
        laws = []
        for law in self.schema.choices:
            triggers = [self._check_trigger(t, law.line) for t in law.triggers]
            self.check_fluent(law.member, law.line)
            if law.generator.name not in self.static_names:
                raise self.error(f"Choice generator {law.generator.name} is not a declared static", law.line)
            for cond in law.body:
                self.check_condition(cond, law.line)

            outer = self.variables_of(triggers, law.body)
            inner = [v for v in self.variables_of([law.member, law.generator]) if v not in outer]
            for binding in self.bindings(outer, law.line):
                ground_triggers = tuple(sorted({t.substitute(binding) for t in triggers}))
                if not all(t in self.actions for t in ground_triggers):
                    continue
                body = self.ground_body(law.body, binding)
                if body is None:
                    continue
                members = set()
                for extra in self.bindings(inner, law.line):
                    full = binding | extra
                    if law.generator.substitute(full).args not in self.statics.get(law.generator.name, ()):
                        continue
                    member = law.member.substitute(full)
                    if member in self.fluents:
                        members.add(member)
                laws.append(ChoiceLaw(ground_triggers, tuple(sorted(members)), body))
        return list(dict.fromkeys(laws))

    def stratify(self, constraints: list[StateConstraint]) -> tuple[tuple[StateConstraint, ...], ...]:
        """Order defined-fluent rules so every rule follows the rules it depends on.

        Raises:
            DomainError: when a defined fluent depends on itself through negation.
        """
        graph = nx.DiGraph()
        defined = {d.name for d in self.schema.fluent_decls.values() if d.kind == FluentKind.DEFINED}
        graph.add_nodes_from(defined)
        for law in self.schema.definitions:
            for cond in law.body:
                if isinstance(cond, Guard) or cond.fluent.name not in defined:
                    continue
                negative = not cond.positive or graph.get_edge_data(cond.fluent.name, law.head.name, {}).get("negative", False)
                graph.add_edge(cond.fluent.name, law.head.name, negative=negative)

        condensed = nx.condensation(graph)
        for component in condensed.nodes:
            members = condensed.nodes[component]["members"]
            for a, b, data in graph.subgraph(members).edges(data=True):
                if data["negative"]:
                    raise self.error(f"Defined fluent {b} depends negatively on {a} within a cycle")

        level = {}
        for component in nx.topological_sort(condensed):
            for name in condensed.nodes[component]["members"]:
                level[name] = component
        order = list(nx.topological_sort(condensed))
        strata: dict[int, list[StateConstraint]] = defaultdict(list)
        for law in constraints:
            strata[order.index(level[law.head.name])].append(law)
        return tuple(tuple(strata[k]) for k in sorted(strata))

    # -- activities and intentions --------------------------------------------

    def ground_activities(self) -> dict[Term, Activity]:
        by_name: dict[str, SchemaActivity] = {}
        for act in self.schema.activities:
            if act.id.name in by_name:
                raise self.error(f"Activity {act.id.name} declared twice", act.line)
            if act.actor is None or act.goal is None:
                raise self.error(f"Activity {act.id} needs an actor and a goal", act.line)
            if sorted(act.components) != list(range(1, len(act.components) + 1)):
                raise self.error(f"Components of {act.id} must be numbered 1..n", act.line)
            by_name[act.id.name] = act

        nesting = nx.DiGraph()
        nesting.add_nodes_from(by_name)
        for act in by_name.values():
            self.check_fluent(act.goal, act.line)
            for comp in act.components.values():
                if comp.name in by_name:
                    if comp.arity != by_name[comp.name].id.arity:
                        raise self.error(f"{comp} does not match activity {by_name[comp.name].id}", act.line)
                    nesting.add_edge(act.id.name, comp.name)
                else:
                    decl = self.check_action(comp, act.line)
                    if decl.kind == ActionKind.EXOGENOUS:
                        raise self.error(f"Exogenous action {comp.name} cannot be a plan component", act.line)
        if not nx.is_directed_acyclic_graph(nesting):
            raise self.error("Activity nesting is cyclic: " +
                             " -> ".join(a for a, _ in nx.find_cycle(nesting)))

        activities: dict[Term, Activity] = {}
        # Ground sub-activities first so parents can refer to them.
        for name in reversed(list(nx.topological_sort(nesting))):
            act = by_name[name]
            plan = [act.components[k] for k in sorted(act.components)]
            names = self.variables_of([act.id, act.actor, act.goal, *plan])
            for binding in self.bindings(names, act.line):
                ground = self._ground_activity(act, plan, binding, activities)
                if ground is None:
                    continue
                previous = activities.get(ground.id)
                if previous is not None and previous != ground:
                    raise self.error(f"Activity {ground.id} grounds to different plans; "
                                     "bind every plan variable in the activity head", act.line)
                activities[ground.id] = ground
        return dict(sorted(activities.items()))

    def _ground_activity(self, act, plan, binding, known) -> Activity | None:
        actor = act.actor.substitute(binding)
        goal = act.goal.substitute(binding)
        if goal not in self.fluents or actor.name not in self.instances:
            return None
        components, subs = [], set()
        for comp in plan:
            ground = comp.substitute(binding)
            if ground in known:
                subs.add(ground)
            elif ground not in self.actions:
                return None
            components.append(ground)
        return Activity(act.id.substitute(binding), actor, goal, tuple(components), frozenset(subs))

    def ground_selections(self, possible: set[tuple[Term, Term]]) -> list[SelectionRule]:
        rules = []
        for sel in self.schema.selections:
            if not sel.agent.is_variable and sel.agent.name not in self.instances:
                raise self.error(f"Unknown agent {sel.agent}", sel.line)
            self.check_fluent(sel.goal, sel.line)
            if sel.trigger is not None:
                self.check_fluent(sel.trigger, sel.line)
            terms = [sel.agent, sel.goal] + ([sel.trigger] if sel.trigger else [])
            for binding in self.bindings(self.variables_of(terms), sel.line):
                agent, goal = sel.agent.substitute(binding), sel.goal.substitute(binding)
                trigger = sel.trigger.substitute(binding) if sel.trigger else None
                if (agent, goal) in possible and (trigger is None or trigger in self.fluents):
                    rules.append(SelectionRule(agent, goal, trigger))
        return list(dict.fromkeys(rules))

    def ground_futility(self, activities: dict[Term, Activity]) -> dict[Term, tuple[Literal, ...]]:
        futility: dict[Term, list[Literal]] = defaultdict(list)
        for rule in self.schema.futility:
            self.check_fluent(rule.fluent, rule.line)
            for binding in self.bindings(self.variables_of([rule.activity, rule.fluent]), rule.line):
                activity = rule.activity.substitute(binding)
                fluent = rule.fluent.substitute(binding)
                if activity in activities and fluent in self.fluents:
                    futility[activity].append(Literal(fluent, rule.value))
        return {k: tuple(dict.fromkeys(v)) for k, v in sorted(futility.items())}

    def ground_initially(self) -> tuple[Literal, ...]:
        literals = []
        for item in self.schema.initially:
            decl = self.check_fluent(item.literal.fluent, item.line)
            if decl.kind != FluentKind.INERTIAL:
                raise self.error(f"Only inertial fluents can be initialised, not {decl.name}", item.line)
            for binding in self.bindings(self.variables_of([item.literal.fluent]), item.line):
                fluent = item.literal.fluent.substitute(binding)
                if fluent in self.fluents:
                    literals.append(Literal(fluent, item.literal.positive))
        return tuple(dict.fromkeys(literals))


def _mental_layer(activities: dict[Term, Activity]):
    """Ground mental actions and fluents for every agent that owns an activity."""
    possible = {(a.actor, a.goal) for a in activities.values()}
    agents = {a.actor for a in activities.values()}

    actions: dict[Term, tuple[Term, ...]] = {}
    for agent, goal in possible:
        for name in GOAL_ACTIONS:
            actions[Term(name, (agent, goal))] = (agent,)
    for activity in activities.values():
        for name in ACTIVITY_ACTIONS:
            actions[Term(name, (activity.actor, activity.id))] = (activity.actor,)
    for agent in agents:
        actions[Term("wait", (agent,))] = (agent,)

    fluents = {Term(name, (agent, goal)) for agent, goal in possible for name in (ACTIVE_GOAL, REPLANNED)}
    return possible, agents, actions, fluents


def _built_in_decls() -> tuple[dict[str, FluentDecl], dict[str, ActionDecl]]:
    fluents = {name: FluentDecl(name, ("agent", "goal"), FluentKind.INERTIAL, Layer.MENTAL)
               for name in (ACTIVE_GOAL, REPLANNED)}
    actions = {name: ActionDecl(name, ("agent", "goal"), ActionKind.MENTAL, (1,)) for name in GOAL_ACTIONS}
    actions |= {name: ActionDecl(name, ("agent", "activity"), ActionKind.MENTAL, (1,)) for name in ACTIVITY_ACTIONS}
    actions["wait"] = ActionDecl("wait", ("agent",), ActionKind.MENTAL, (1,))
    return fluents, actions


def _functional_groups(fluents: Iterable[Term], decls: dict[str, FluentDecl]) -> dict[Term, tuple[Term, ...]]:
    groups: dict[tuple, list[Term]] = defaultdict(list)
    for fluent in fluents:
        pos = decls[fluent.name].functional
        if pos is None:
            continue
        key = (fluent.name, fluent.args[:pos - 1] + fluent.args[pos:])
        groups[key].append(fluent)
    return {f: tuple(sorted(g for g in group if g != f))
            for group in groups.values() for f in group}


def _static_relations(grounder: Grounder, activities: dict[Term, Activity], actors) -> None:
    """Expose the activity encoding as static relations alongside declared statics."""
    statics = grounder.statics
    for action, who in actors.items():
        for agent in who:
            statics["actor"].add((action, agent))
    for activity in activities.values():
        statics["length"].add((activity.id, Term(str(activity.length))))
        statics["goal"].add((activity.id, activity.goal))
        statics["possible_goal"].add((activity.actor, activity.goal))
        for k, comp in enumerate(activity.components, start=1):
            statics["comp"].add((activity.id, Term(str(k)), comp))


def ground_domain(schema: SchematicDomain, extra_instances: dict[str, str] | None = None) -> Domain:
    """Ground ``schema`` over its instances plus ``extra_instances``.

    Raises:
        DomainError: unknown sorts, arity mismatches, ill-sorted laws, cyclic
            definitions through negation, cyclic activity nesting.
    """
    g = Grounder(schema, extra_instances)
    actors = g.ground_declarations()
    g.ground_statics()

    dynamic = g.ground_causes()
    constraints = g.ground_definitions()
    strata = g.stratify(constraints)
    executability = g.ground_impossible()
    choices = g.ground_choices()
    activities = g.ground_activities()

    possible, agents, mental_actions, mental_fluents = _mental_layer(activities)
    actors |= mental_actions
    _static_relations(g, activities, actors)
    fluent_decls, action_decls = _built_in_decls()
    fluent_decls = dict(schema.fluent_decls) | fluent_decls
    action_decls = dict(schema.action_decls) | action_decls
    fluents = g.fluents | mental_fluents

    domain = Domain(
        source=schema.source,
        sorts=dict(schema.sorts),
        instances=g.instances,
        fluent_decls=fluent_decls,
        action_decls=action_decls,
        fluents=fluents,
        actions=g.actions | frozenset(mental_actions),
        actors=actors,
        dynamic_laws=tuple(dynamic),
        state_constraints=tuple(constraints),
        executability=tuple(executability),
        choice_laws=tuple(choices),
        strata=strata,
        statics={k: frozenset(v) for k, v in g.statics.items()},
        activities=activities,
        agents=frozenset(agents),
        possible_goals=frozenset(possible),
        selection_rules=tuple(g.ground_selections(possible)),
        futility=g.ground_futility(activities),
        initial=g.ground_initially(),
        required_sorts=tuple(schema.required),
        functional_groups=_functional_groups(fluents, fluent_decls),
    )
    logger.info("Domain %s: %d laws, %d activities, %d agents",
                schema.source, len(domain.laws), len(activities), len(agents))
    return domain
