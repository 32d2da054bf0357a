"""The reader: builds every consistent interpretation of a story.

Interpretation is a search over branches. A branch is a trajectory prefix
together with the story steps read so far, the activities agents chose and
the exogenous actions assumed to have happened unobserved. At each reasoning
step the reader:

* fires default goal selections and starts an activity for each goal
  selected the step before (one branch per candidate activity);
* either reads the next story step here or defers it;
* lets every agent do what its mental state intends, adds the story's
  non-agent actions, and checks the story against the result;
* branches on exogenous actions that would combine with what happens;
* computes the successor states.

A story observation the trajectory contradicts sends the search back to an
earlier step with an exogenous action that explains it. A branch ends when a
step has no occurrences (it succeeds if every story step was read) or at the
horizon.
"""

import itertools
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterator

from errors import InconsistentTransition
from intentions.mental import active_goal, initial_mental, mental, mental_legal, progress
from kb.domain import Domain, State
from kb.restaurant import candidate_activities, default_selections
from kb.terms import Term
from kb.transition import initial_state, legal, successors
from reader.categories import intended_occurrences, justified
from reader.diagnosis import Diagnoser
from reader.history import ActivityChoice, History, Model, StoryFact, TimelineMapping
from reader.mapping import mapping_allowed

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Branch:
    states: tuple[State, ...]
    occurrences: tuple[frozenset[Term], ...] = ()
    mapping: TimelineMapping = TimelineMapping()
    choices: tuple[ActivityChoice, ...] = ()
    abduced: frozenset[tuple[int, Term]] = frozenset()

    @property
    def step(self) -> int:
        return len(self.states) - 1

    @property
    def state(self) -> State:
        return self.states[-1]

    def truncate(self, step: int) -> "Branch":
        """The branch as it stood when reasoning step ``step`` began."""
        return Branch(
            states=self.states[:step + 1],
            occurrences=self.occurrences[:step],
            mapping=self.mapping.truncate(step),
            choices=tuple(c for c in self.choices if c.step < step),
            abduced=frozenset(a for a in self.abduced if a[0] < step),
        )


@dataclass(frozen=True)
class Decisions:
    """Decisions fixed in advance; used to re-check one branch of the search."""
    mapping: TimelineMapping
    choices: tuple[ActivityChoice, ...] = ()
    abduced: frozenset[tuple[int, Term]] = frozenset()

    @classmethod
    def of(cls, model: Model) -> "Decisions":
        return cls(model.mapping, model.choices, frozenset(model.abduced))


@dataclass(frozen=True, order=True)
class Failure:
    step: int
    reason: str = field(compare=False)


@dataclass
class Interpretation:
    """Models of a story, plus why the search stopped short when there are none."""
    models: list[Model]
    horizon: int
    diagnostic: str | None = None
    elapsed: float = 0.0

    def __iter__(self) -> Iterator[Model]:
        return iter(self.models)

    def __len__(self) -> int:
        return len(self.models)

    def __bool__(self) -> bool:
        return bool(self.models)


def story_initial_state(domain: Domain, history: History) -> State:
    """Step-0 state: domain defaults, the story's ``initially`` overrides, no intentions."""
    return initial_mental(initial_state(domain, history.initially))


class Reader:
    """Depth-first search over branches of one story."""

    def __init__(self, domain: Domain, history: History, horizon: int,
                 max_abductions: int = 2, fixed: Decisions | None = None):
        self.domain = domain
        self.history = history
        self.horizon = horizon
        self.max_abductions = max_abductions
        self.fixed = fixed
        self.story_length = len(history.story_steps)
        self.diagnoser = Diagnoser(domain)
        self.failure: Failure | None = None
        self._restarts: set = set()

    def root(self) -> Branch:
        abduced = self.fixed.abduced if self.fixed else frozenset()
        return Branch((story_initial_state(self.domain, self.history),), abduced=abduced)

    def fail(self, step: int, reason: str) -> None:
        logger.debug("Prune at %d: %s", step, reason)
        failure = Failure(step, reason)
        if self.failure is None or failure > self.failure:
            self.failure = failure

    # -- search ---------------------------------------------------------------

    def search(self, branches: list[Branch]) -> list[Model]:
        models: list[Model] = []
        stack = list(reversed(branches))
        while stack:
            children, finished = self.expand(stack.pop())
            models.extend(finished)
            stack.extend(reversed(children))
        return models

    def expand(self, branch: Branch) -> tuple[list[Branch], list[Model]]:
        """Children of ``branch`` and the models it completes."""
        i = branch.step
        state = branch.state
        selections = default_selections(self.domain, branch.states)
        pending = {e for j, e in branch.abduced if j == i}
        children: list[Branch] = []
        models: list[Model] = []

        for starts, started in self._start_options(branch):
            for read_here in self._map_options(branch):
                story_step = len(branch.mapping)
                mapping = branch.mapping.extend(i) if read_here else branch.mapping
                hpd = self.history.hpd_at(story_step) if read_here else []
                obs = self.history.obs_at(story_step) if read_here else []

                violated = [f for f in obs if not state.satisfies(f.literal)]
                if violated:
                    self.fail(i, f"story step {story_step}: observed {violated[0].literal} "
                                 f"does not hold at step {i}")
                    children.extend(self._restarts_for(branch, violated))
                    continue

                fixed = set(selections) | set(starts) | pending
                fixed |= {f.term for f in hpd if f.value and not self.domain.agent_actors(f.term)}
                intended = intended_occurrences(self.domain, state, [f.literal for f in obs], fixed)
                base = fixed.union(*intended.values())
                choices = branch.choices + started

                for occ, abduced in self._abduction_options(branch, base):
                    reason = self._check(state, occ, hpd)
                    if reason:
                        self.fail(i, reason)
                        continue
                    remaining = self.story_length - len(mapping)
                    if not occ or i >= self.horizon:
                        if remaining:
                            what = "no occurrences" if not occ else "horizon reached"
                            self.fail(i, f"{what} at step {i} with {remaining} story step(s) unread")
                            continue
                        models.append(self._model(branch, mapping, choices, quiescent=not occ))
                        continue
                    try:
                        nexts = successors(self.domain, state, occ)
                    except InconsistentTransition as e:
                        self.fail(i, str(e))
                        continue
                    for nxt in nexts:
                        after = progress(self.domain, state, occ, nxt)
                        children.append(Branch(
                            states=branch.states + (after,),
                            occurrences=branch.occurrences + (frozenset(occ),),
                            mapping=mapping,
                            choices=choices,
                            abduced=abduced,
                        ))
        return children, models

    # -- options at one step --------------------------------------------------

    def _start_options(self, branch: Branch) -> list[tuple[tuple[Term, ...], tuple[ActivityChoice, ...]]]:
        """One activity start per goal selected at the previous step, for each combination."""
        i = branch.step
        if i == 0:
            return [((), ())]
        per_goal = []
        for action in sorted(branch.occurrences[-1]):
            if action.name != "select" or not self.domain.is_mental(action):
                continue
            agent, goal = action.args
            if active_goal(agent, goal) not in branch.state:
                continue
            options = []
            for activity in candidate_activities(self.domain, agent, goal):
                choice = ActivityChoice(i, agent, goal, activity.id)
                if self.fixed and choice not in self.fixed.choices:
                    continue
                options.append((mental("start", agent, activity.id), choice))
            if options:
                per_goal.append(options)
        return [(tuple(s for s, _ in combo), tuple(c for _, c in combo))
                for combo in itertools.product(*per_goal)]

    def _map_options(self, branch: Branch) -> list[bool]:
        """Whether the next story step is read at this step: [True], [False] or both."""
        s = len(branch.mapping)
        i = branch.step
        if s >= self.story_length:
            return [False]
        if self.fixed:
            return [len(self.fixed.mapping) > s and self.fixed.mapping[s] == i]
        allowed = mapping_allowed(self.history, branch.mapping, s, i)
        if s > 0 and self.history.forced_next(s):
            return [True] if allowed else []
        return [True, False]

    def _abduction_options(self, branch: Branch, base: set[Term]) -> list[tuple[frozenset[Term], frozenset]]:
        """Occurrence sets with and without each exogenous action that would join in."""
        i = branch.step
        candidates = self.diagnoser.cooccurring(branch.state, base)
        if self.fixed:
            candidates = []
        options = []
        for picks in itertools.product((False, True), repeat=len(candidates)):
            chosen = [e for e, keep in zip(candidates, picks) if keep]
            abduced = branch.abduced | {(i, e) for e in chosen}
            if len(abduced) > self.max_abductions:
                continue
            options.append((frozenset(base | set(chosen)), frozenset(abduced)))
        return options

    def _restarts_for(self, branch: Branch, violated: list[StoryFact]) -> list[Branch]:
        """Re-run from earlier steps with an exogenous action explaining an observation."""
        if self.fixed:
            return []
        restarts = []
        for fact in violated:
            for j, action in self.diagnoser.explain(branch.states, fact.literal, branch.step):
                base = branch.truncate(j)
                abduced = base.abduced | {(j, action)}
                if len(abduced) > self.max_abductions:
                    continue
                key = (base.occurrences, base.mapping, base.choices, abduced)
                if key in self._restarts:
                    continue
                self._restarts.add(key)
                logger.debug("Restart at %d with %s", j, action)
                restarts.append(replace(base, abduced=abduced))
        return restarts

    def _check(self, state: State, occ: frozenset[Term], hpd: list[StoryFact]) -> str | None:
        """Why ``occ`` cannot happen in ``state`` given the story facts read here, or None."""
        for fact in hpd:
            if fact.value and fact.term not in occ:
                return f"story action {fact.term} is not intended here"
            if not fact.value and fact.term in occ:
                return f"story says {fact.term} did not happen"
        if not legal(self.domain, state, occ):
            return "occurrences are not executable together"
        if not mental_legal(self.domain, state, occ):
            return "mental actions are not possible together"
        for action in occ:
            if self.domain.is_physical(action) and not self.domain.is_exogenous(action):
                for agent in self.domain.agent_actors(action):
                    if not justified(self.domain, state, agent, action):
                        return f"{action} is not intended by {agent}"
        return None

    def _model(self, branch: Branch, mapping: TimelineMapping,
               choices: tuple[ActivityChoice, ...], quiescent: bool) -> Model:
        last = branch.step
        abduced = sorted((a for a in branch.abduced if a[0] < last), key=lambda a: (a[0], str(a[1])))
        return Model(
            id=0,
            mapping=mapping,
            states=branch.states,
            occurrences=branch.occurrences,
            abduced=tuple(abduced),
            choices=choices,
            quiescent=quiescent,
        )


# -- result assembly ----------------------------------------------------------

def _minimal(models: list[Model]) -> list[Model]:
    """Drop models whose abduced set strictly contains another's with the same mapping and choices."""
    groups: dict[tuple, list[frozenset]] = {}
    for m in models:
        groups.setdefault((m.mapping, m.choices), []).append(frozenset(m.abduced))
    return [m for m in models
            if not any(other < frozenset(m.abduced) for other in groups[(m.mapping, m.choices)])]


def finish(models: list[Model], max_models: int = 0) -> list[Model]:
    """De-duplicate, keep minimal abductions, sort and number the models."""
    unique: dict[tuple, Model] = {}
    for m in models:
        unique.setdefault(m.signature, m)
    kept = sorted(_minimal(list(unique.values())), key=Model.sort_key)
    if max_models:
        kept = kept[:max_models]
    return [replace(m, id=n) for n, m in enumerate(kept, start=1)]


# -- process pool -------------------------------------------------------------

_worker: Reader | None = None


def _init_worker(domain: Domain, history: History, horizon: int, max_abductions: int) -> None:
    global _worker
    _worker = Reader(domain, history, horizon, max_abductions)


def _search_worker(branch: Branch) -> tuple[list[Model], Failure | None]:
    _worker.failure = None
    models = _worker.search([branch])
    return models, _worker.failure


def _frontier(reader: Reader, size: int) -> tuple[list[Branch], list[Model]]:
    """Expand breadth-first until at least ``size`` branches are open."""
    frontier, models = [reader.root()], []
    while frontier and len(frontier) < size:
        layer = []
        for branch in frontier:
            children, finished = reader.expand(branch)
            layer.extend(children)
            models.extend(finished)
        frontier = layer
    return frontier, models


def interpret(domain: Domain, history: History, horizon: int = 40, max_models: int = 0,
              parallelism: int = 1, max_abductions: int = 2) -> Interpretation:
    """All models of ``history`` within ``horizon`` reasoning steps.

    The result is identical whatever ``parallelism`` is: models are sorted by
    mapping, then abduced actions, then activity choices, then occurrences,
    and numbered from 1.
    """
    started = time.perf_counter()
    reader = Reader(domain, history, horizon, max_abductions)

    if parallelism > 1:
        frontier, models = _frontier(reader, parallelism * 4)
        failures = [reader.failure] if reader.failure else []
        with ProcessPoolExecutor(max_workers=parallelism, initializer=_init_worker,
                                 initargs=(domain, history, horizon, max_abductions)) as pool:
            for found, failure in pool.map(_search_worker, frontier):
                models.extend(found)
                if failure:
                    failures.append(failure)
        failure = max(failures) if failures else None
    else:
        models = reader.search([reader.root()])
        failure = reader.failure

    result = finish(models, max_models)
    elapsed = time.perf_counter() - started
    diagnostic = None
    if not result:
        diagnostic = failure.reason if failure else "no story step could be read"
        logger.warning("No model within horizon %d: %s", horizon, diagnostic)
    logger.info("%d model(s) in %.2fs", len(result), elapsed)
    return Interpretation(result, horizon, diagnostic, elapsed)


# -- re-checking ----------------------------------------------------------------

def replay(domain: Domain, history: History, model: Model) -> bool:
    """Re-simulate ``model``'s occurrences and compare every state."""
    if model.states[0] != story_initial_state(domain, history):
        return False
    for i, occ in enumerate(model.occurrences):
        before = model.states[i]
        if not legal(domain, before, occ) or not mental_legal(domain, before, occ):
            return False
        try:
            nexts = successors(domain, before, occ)
        except InconsistentTransition:
            return False
        if model.states[i + 1] not in [progress(domain, before, occ, n) for n in nexts]:
            return False
    return True


def check_branch(domain: Domain, history: History, decisions: Decisions,
                 horizon: int = 40) -> list[Model]:
    """Models reachable when mapping, activity choices and abductions are all fixed."""
    reader = Reader(domain, history, horizon, max_abductions=len(decisions.abduced), fixed=decisions)
    return finish(reader.search([reader.root()]))
