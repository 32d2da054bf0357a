"""Enumerations and fixed names shared across packages."""

from enum import Enum


class FluentKind(str, Enum):
    INERTIAL = "inertial"
    DEFINED = "defined"


class Layer(str, Enum):
    PHYSICAL = "physical"
    MENTAL = "mental"


class ActionKind(str, Enum):
    AGENT = "agent"
    MENTAL = "mental"
    EXOGENOUS = "exogenous"


class QuestionKind(str, Enum):
    OCCUR = "occur"
    WHEN = "when"
    WHO = "who"
    WHERE = "where"


class Verdict(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"
    DEPENDS = "depends"
    NEVER = "never"
    NO_MODEL = "no consistent interpretation"


# Mental actions of the theory of intentions, by arity shape.
GOAL_ACTIONS = ("select", "abandon", "replan")
ACTIVITY_ACTIONS = ("start", "stop")
MENTAL_ACTIONS: set[str] = {*GOAL_ACTIONS, *ACTIVITY_ACTIONS, "wait"}

# Mental fluents kept as boolean fluents of the state.
ACTIVE_GOAL = "active_goal"
REPLANNED = "replanned"

# CLI exit codes
EXIT_OK = 0
EXIT_PARSE = 1
EXIT_NO_MODEL = 2
EXIT_GOLDEN = 3
