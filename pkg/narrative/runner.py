"""One interpretation run: narrative file in, report and exit status out."""

import logging
from dataclasses import dataclass, field
from pathlib import Path

from config.constants import EXIT_GOLDEN, EXIT_NO_MODEL, EXIT_OK, EXIT_PARSE
from config.settings import Settings, get_settings
from errors import DomainError, NarrativeError, QuestionError
from kb.domain import Domain
from kb.restaurant import action_sorts, build_domain, sort_parents
from narrative.frames import load_rules
from narrative.golden import diff_golden, load_golden
from narrative.parser import NarrativeFile, load_narrative, parse_narrative, to_history
from narrative.report import Report
from qa.answers import answer
from qa.questions import parse_question, validate
from reader.engine import interpret
from reader.history import History

logger = logging.getLogger(__name__)


@dataclass
class RunOptions:
    """Command-line flags; None means "use the configured setting"."""
    domain: str | None = None
    horizon: int | None = None
    max_models: int | None = None
    parallelism: int | None = None
    max_abductions: int | None = None
    strict_frames: bool | None = None
    golden: str | None = None
    ask: list[str] = field(default_factory=list)

    def settings(self) -> Settings:
        return get_settings(
            domain=self.domain,
            horizon=self.horizon,
            max_models=self.max_models,
            parallelism=self.parallelism,
            max_abductions=self.max_abductions,
            strict_frames=self.strict_frames,
        )


@dataclass
class RunResult:
    exit_code: int
    report: Report | None = None
    domain: Domain | None = None
    error: str | None = None


def prepare(nf: NarrativeFile, settings: Settings) -> tuple[Domain, History, Report]:
    """Map frames, ground the domain over the story's instances and validate the story."""
    rules = None
    if nf.frames or nf.drs:
        rules = load_rules(nf.rules_path or settings.frame_rules_path)
    history, mapped = to_history(nf, rules, action_sorts(settings.domain_path), settings.strict_frames,
                                 sort_parents(settings.domain_path))
    domain = build_domain(history.instances, settings.domain_path)
    history.validate(domain)
    report = Report(
        narrative=Path(nf.source).name if nf.source else "<text>",
        horizon=settings.horizon,
        skipped_frames=[f"{frame.id} ({reason})" for frame, reason in mapped.skipped],
        minted=dict(mapped.minted),
    )
    return domain, history, report


def run_narrative(nf: NarrativeFile, options: RunOptions | None = None) -> RunResult:
    """Interpret a parsed narrative and answer its questions (plus ``options.ask``)."""
    options = options or RunOptions()
    try:
        settings = options.settings()
        domain, history, report = prepare(nf, settings)
        questions = list(dict.fromkeys([*history.questions, *(parse_question(q) for q in options.ask)]))
        story_length = len(history.story_steps)
        for q in questions:
            validate(domain, q, story_length)
        golden = load_golden(options.golden) if options.golden else None
    except (DomainError, NarrativeError, QuestionError, ValueError) as e:
        logger.error("%s", e)
        return RunResult(EXIT_PARSE, error=str(e))

    interpretation = interpret(
        domain, history,
        horizon=settings.horizon,
        max_models=settings.max_models,
        parallelism=settings.parallelism,
        max_abductions=settings.max_abductions,
    )
    report.models = interpretation.models
    report.diagnostic = interpretation.diagnostic
    report.elapsed = interpretation.elapsed
    report.answers = [answer(domain, report.models, q, story_length) for q in questions]

    code = EXIT_OK
    if golden is not None:
        report.golden = diff_golden(report.models, golden, options.golden)
        if not report.golden.matched:
            code = EXIT_GOLDEN
    if not report.models:
        code = EXIT_NO_MODEL
    return RunResult(code, report, domain)


def run(narrative_path: str | Path, options: RunOptions | None = None) -> RunResult:
    """Interpret the narrative file at ``narrative_path``.

    Exit codes: 0 ok, 1 parse or validation error, 2 no model, 3 golden mismatch.
    """
    try:
        nf = load_narrative(narrative_path)
    except NarrativeError as e:
        logger.error("%s", e)
        return RunResult(EXIT_PARSE, error=str(e))
    return run_narrative(nf, options)


def run_text(text: str, options: RunOptions | None = None, name: str = "<text>") -> RunResult:
    try:
        nf = parse_narrative(text, source=name)
    except NarrativeError as e:
        return RunResult(EXIT_PARSE, error=str(e))
    return run_narrative(nf, options)
