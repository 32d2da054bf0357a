"""Narrative files, event frames, reports, golden traces and the run driver."""

from .frames import (
    DrsAtom,
    EventFrame,
    FrameMapping,
    FrameRules,
    MappingRule,
    frames_from_drs,
    load_rules,
    map_frames,
    parse_rules,
)
from .parser import NarrativeFile, load_narrative, parse_narrative, print_narrative, to_history
from .report import GoldenDiff, Report, render_text, timeline_frame, to_dict, to_json
from .golden import diff_golden, load_golden, model_atoms, parse_golden, write_golden
from .runner import RunOptions, RunResult, run, run_narrative, run_text
