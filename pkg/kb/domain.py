"""Data types of the action language: declarations, ground laws, activities, Domain, State."""

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import networkx as nx

from config.constants import ActionKind, FluentKind, Layer
from kb.terms import Term


class Literal(NamedTuple):
    fluent: Term
    positive: bool = True

    def __str__(self) -> str:
        return str(self.fluent) if self.positive else f"-{self.fluent}"

    def complement(self) -> "Literal":
        return Literal(self.fluent, not self.positive)


# -- declarations -------------------------------------------------------------

@dataclass(frozen=True)
class FluentDecl:
    name: str
    sorts: tuple[str, ...]
    kind: FluentKind = FluentKind.INERTIAL
    layer: Layer = Layer.PHYSICAL
    functional: int | None = None     # 1-based value position


@dataclass(frozen=True)
class ActionDecl:
    name: str
    sorts: tuple[str, ...]
    kind: ActionKind = ActionKind.AGENT
    actors: tuple[int, ...] = ()      # 1-based argument positions


# -- ground laws --------------------------------------------------------------

@dataclass(frozen=True)
class DynamicLaw:
    """``triggers`` occurring together, with ``body`` true, cause ``head`` next step."""
    triggers: tuple[Term, ...]
    head: Literal
    body: tuple[Literal, ...] = ()
    defeasible: bool = False


@dataclass(frozen=True)
class StateConstraint:
    """``head`` (a defined fluent) holds whenever every body literal does."""
    head: Term
    body: tuple[Literal, ...] = ()


@dataclass(frozen=True)
class Executability:
    """``action`` is impossible whenever every body literal holds."""
    action: Term
    body: tuple[Literal, ...] = ()


@dataclass(frozen=True)
class ChoiceLaw:
    """When the triggers co-occur, exactly one member becomes true, the rest false."""
    triggers: tuple[Term, ...]
    members: tuple[Term, ...]
    body: tuple[Literal, ...] = ()


Law = DynamicLaw | StateConstraint | Executability | ChoiceLaw


@dataclass(frozen=True)
class Activity:
    """A goal plus an ordered plan of actions and sub-activities."""
    id: Term
    actor: Term
    goal: Term
    components: tuple[Term, ...]
    subactivities: frozenset[Term] = frozenset()

    @property
    def length(self) -> int:
        return len(self.components)

    def component(self, k: int) -> Term | None:
        """1-based plan lookup."""
        if 1 <= k <= len(self.components):
            return self.components[k - 1]
        return None

    def is_subactivity(self, component: Term) -> bool:
        return component in self.subactivities


@dataclass(frozen=True)
class SelectionRule:
    """Default goal selection; ``trigger`` None means at step 0."""
    agent: Term
    goal: Term
    trigger: Term | None = None


# -- the grounded domain ------------------------------------------------------

@dataclass
class Domain:
    """A grounded domain. Treated as immutable once the grounder returns it."""
    source: str
    sorts: dict[str, str | None]
    instances: dict[str, str]
    fluent_decls: dict[str, FluentDecl]
    action_decls: dict[str, ActionDecl]
    fluents: frozenset[Term]
    actions: frozenset[Term]
    actors: dict[Term, tuple[Term, ...]]
    dynamic_laws: tuple[DynamicLaw, ...]
    state_constraints: tuple[StateConstraint, ...]
    executability: tuple[Executability, ...]
    choice_laws: tuple[ChoiceLaw, ...]
    strata: tuple[tuple[StateConstraint, ...], ...]
    statics: dict[str, frozenset[tuple[Term, ...]]]
    activities: dict[Term, Activity]
    agents: frozenset[Term]
    possible_goals: frozenset[tuple[Term, Term]]
    selection_rules: tuple[SelectionRule, ...]
    futility: dict[Term, tuple[Literal, ...]]
    initial: tuple[Literal, ...]
    required_sorts: tuple[str, ...] = ()
    functional_groups: dict[Term, tuple[Term, ...]] = field(default_factory=dict)

    # -- indices --------------------------------------------------------------

    @cached_property
    def inertial(self) -> frozenset[Term]:
        return frozenset(f for f in self.fluents
                         if self.fluent_decls[f.name].kind == FluentKind.INERTIAL)

    @cached_property
    def defined(self) -> frozenset[Term]:
        return self.fluents - self.inertial

    @cached_property
    def laws_by_trigger(self) -> dict[Term, tuple[DynamicLaw, ...]]:
        index = defaultdict(list)
        for law in self.dynamic_laws:
            index[min(law.triggers)].append(law)
        return {k: tuple(v) for k, v in index.items()}

    @cached_property
    def choices_by_trigger(self) -> dict[Term, tuple[ChoiceLaw, ...]]:
        index = defaultdict(list)
        for law in self.choice_laws:
            index[min(law.triggers)].append(law)
        return {k: tuple(v) for k, v in index.items()}

    @cached_property
    def impossible_when(self) -> dict[Term, tuple[tuple[Literal, ...], ...]]:
        index = defaultdict(list)
        for law in self.executability:
            index[law.action].append(law.body)
        return {k: tuple(v) for k, v in index.items()}

    @cached_property
    def goals_of(self) -> dict[Term, tuple[Term, ...]]:
        """Agent -> possible goals, sorted."""
        index = defaultdict(set)
        for agent, goal in self.possible_goals:
            index[agent].add(goal)
        return {k: tuple(sorted(v)) for k, v in index.items()}

    @cached_property
    def activities_of(self) -> dict[Term, tuple[Activity, ...]]:
        index = defaultdict(list)
        for activity in self.activities.values():
            index[activity.actor].append(activity)
        return {k: tuple(sorted(v, key=lambda a: a.id)) for k, v in index.items()}

    @cached_property
    def parents(self) -> dict[Term, tuple[Term, ...]]:
        """Sub-activity -> activities listing it as a component."""
        index = defaultdict(set)
        for activity in self.activities.values():
            for sub in activity.subactivities:
                index[sub].add(activity.id)
        return {k: tuple(sorted(v)) for k, v in index.items()}

    @property
    def laws(self) -> list[Law]:
        return [*self.dynamic_laws, *self.state_constraints,
                *self.executability, *self.choice_laws]

    # -- queries --------------------------------------------------------------

    def kind_of(self, action: Term) -> ActionKind:
        return self.action_decls[action.name].kind

    def is_exogenous(self, action: Term) -> bool:
        decl = self.action_decls.get(action.name)
        return decl is not None and decl.kind == ActionKind.EXOGENOUS

    def is_mental(self, action: Term) -> bool:
        decl = self.action_decls.get(action.name)
        return decl is not None and decl.kind == ActionKind.MENTAL

    def is_physical(self, action: Term) -> bool:
        return action in self.actions and not self.is_mental(action)

    def agent_actors(self, action: Term) -> tuple[Term, ...]:
        """Actors of ``action`` that are intentional agents (have activities)."""
        return tuple(a for a in self.actors.get(action, ()) if a in self.agents)

    @cached_property
    def sort_tree(self) -> nx.DiGraph:
        """Parent sort -> child sort edges."""
        graph = nx.DiGraph()
        graph.add_nodes_from(self.sorts)
        graph.add_edges_from((parent, child) for child, parent in self.sorts.items() if parent is not None)
        return graph

    def members(self, sort: str) -> list[str]:
        """Instances of ``sort`` including its sub-sorts, sorted."""
        wanted = {sort} | (nx.descendants(self.sort_tree, sort) if sort in self.sort_tree else set())
        return sorted(name for name, s in self.instances.items() if s in wanted)

    def static_holds(self, name: str, args: tuple[Term, ...]) -> bool:
        return args in self.statics.get(name, frozenset())


# -- states -------------------------------------------------------------------

@dataclass(frozen=True)
class State:
    """Complete assignment: fluents in ``holds`` are true, all others false.

    ``status`` holds (agent, activity, k) for every activity with k >= 0; an
    absent activity has status -1.
    """
    holds: frozenset[Term]
    status: frozenset[tuple[Term, Term, int]] = frozenset()

    def __contains__(self, fluent: Term) -> bool:
        return fluent in self.holds

    def satisfies(self, literal: Literal) -> bool:
        return (literal.fluent in self.holds) == literal.positive

    def satisfies_all(self, literals) -> bool:
        return all((l.fluent in self.holds) == l.positive for l in literals)

    @cached_property
    def status_map(self) -> dict[tuple[Term, Term], int]:
        return {(agent, activity): k for agent, activity, k in self.status}

    def status_of(self, agent: Term, activity: Term) -> int:
        return self.status_map.get((agent, activity), -1)

    def assignment(self, domain: Domain) -> dict[Term, bool]:
        return {f: f in self.holds for f in sorted(domain.fluents)}
