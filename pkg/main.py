"""Narrative Intentions: CLI entry point."""

import logging
import sys
from pathlib import Path

from config import EXIT_OK, EXIT_PARSE, get_scenario_by_slug, get_scenarios, get_settings
from errors import DomainError
from kb.restaurant import build_domain
from narrative.report import render_text, to_json
from narrative.runner import RunOptions, run


def _flag(args: list[str], name: str) -> str | None:
    """Value following ``name`` in ``args``, or None."""
    if name in args:
        idx = args.index(name)
        if idx + 1 < len(args):
            return args[idx + 1]
        raise ValueError(f"{name} needs a value")
    return None


def _int_flag(args: list[str], name: str) -> int | None:
    value = _flag(args, name)
    if value is None:
        return None
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"{name} expects an integer, got {value!r}") from None


def _asks(args: list[str]) -> list[str]:
    """All ``--ask <question>`` values; the flag may repeat."""
    asks = []
    for i, arg in enumerate(args):
        if arg == "--ask" and i + 1 < len(args):
            asks.append(args[i + 1])
    return asks


def _options(args: list[str]) -> RunOptions:
    domain = _flag(args, "--domain")
    return RunOptions(
        domain=str(Path(domain).resolve()) if domain else None,
        horizon=_int_flag(args, "--horizon"),
        max_models=_int_flag(args, "--max-models"),
        parallelism=_int_flag(args, "--parallelism"),
        strict_frames=True if "--strict-frames" in args else None,
        golden=_flag(args, "--golden"),
        ask=_asks(args),
    )


def run_command(target: str, args: list[str]) -> int:
    """Interpret a story file (or a bundled scenario slug) and print the report."""
    options = _options(args)
    path = Path(target)
    if not path.exists():
        scenario = get_scenario_by_slug(target)
        if scenario is None:
            print(f"No such story file or scenario: '{target}'")
            return EXIT_PARSE
        path = scenario.story_path

    result = run(path, options)
    if result.report is None:
        print(f"Error: {result.error}")
        return result.exit_code

    if "--json" in args:
        print(to_json(result.report))
    else:
        print(render_text(result.report, result.domain, timeline="--timeline" in args), end="")
    return result.exit_code


def list_scenarios():
    """Show the bundled scenarios."""
    print(f"\n{'='*50}")
    print("Bundled Scenarios")
    print(f"{'='*50}")

    for s in get_scenarios():
        default = " (default)" if s.is_default else ""
        print(f"\n  {s.name}{default}  [slug: {s.slug}]")
        print(f"    story:  {s.story}")
        if s.golden:
            print(f"    golden: {s.golden}  ({s.expected_models} model(s))")
        if s.description:
            print(f"    {s.description}")


def check_command(slug: str | None, args: list[str]) -> int:
    """Run bundled scenarios against their golden traces and model counts."""
    scenarios = get_scenarios()
    if slug:
        scenario = get_scenario_by_slug(slug)
        if scenario is None:
            print(f"Unknown scenario slug: '{slug}'")
            return EXIT_PARSE
        scenarios = [scenario]

    print(f"\n{'='*50}")
    print("Scenario Check")
    print(f"{'='*50}")

    worst = EXIT_OK
    base = _options(args)
    for s in scenarios:
        options = RunOptions(
            domain=base.domain,
            horizon=base.horizon,
            parallelism=base.parallelism,
            golden=str(s.golden_path) if s.golden_path else None,
        )
        result = run(s.story_path, options)
        code = result.exit_code
        found = result.report.model_count if result.report else 0
        status = "ok"
        if code != EXIT_OK:
            status = result.error or f"exit {code}"
            if result.report and result.report.golden and not result.report.golden.matched:
                status = "golden mismatch"
        elif s.expected_models is not None and found != s.expected_models:
            status = f"expected {s.expected_models} model(s)"
            code = EXIT_PARSE
        print(f"  {s.slug:<18} {found:>3} model(s)  {status}")
        worst = max(worst, code)
    return worst


def show_domain(args: list[str]):
    """Print sorts, ground sizes and activity plans of the domain."""
    domain_flag = _flag(args, "--domain")
    settings = get_settings(domain=str(Path(domain_flag).resolve()) if domain_flag else None)
    domain = build_domain(path=settings.domain_path)

    print(f"\n{'='*50}")
    print(f"Domain: {Path(domain.source).name}")
    print(f"{'='*50}")

    print("\n  Sorts:")
    for sort, parent in sorted(domain.sorts.items()):
        members = sorted(name for name, s in domain.instances.items() if s == sort)
        under = f" < {parent}" if parent else ""
        listed = f": {', '.join(members)}" if members else ""
        print(f"    {sort}{under}{listed}")

    print("\n  Ground sizes:")
    print(f"    fluents:       {len(domain.fluents)}")
    print(f"    actions:       {len(domain.actions)}")
    print(f"    laws:          {len(domain.laws)}")
    print(f"    agents:        {', '.join(sorted(map(str, domain.agents)))}")

    print("\n  Activities:")
    for activity in sorted(domain.activities.values(), key=lambda a: str(a.id)):
        print(f"    {activity.id}  goal={activity.goal}")
        for k, component in enumerate(activity.components, start=1):
            print(f"      {k}. {component}")


USAGE = """
Usage:
  python main.py run <story|slug> [flags]       - Interpret a narrative and print the report
  python main.py scenarios                      - Show bundled scenarios
  python main.py check [slug]                   - Run bundled scenarios against golden traces
  python main.py domain [--domain FILE]         - Summarize the domain description

Run flags:
  --domain FILE        Domain description (default: kb/restaurant.domain)
  --horizon N          Reasoning-timeline length bound
  --max-models N       Keep at most N models (0 = all)
  --parallelism N      Worker processes for the search
  --json               Print the machine report instead of text
  --golden FILE        Diff model atoms against a golden trace
  --ask "QUESTION"     Extra question, e.g. "occur pay(nicole,b)" (repeatable)
  --strict-frames      Treat unmatched event frames as errors
  --timeline           Print each model as a step x agent table
""".strip()


def main() -> int:
    args = sys.argv[1:]

    if not args:
        print("Narrative Intentions\n")
        print(USAGE)
        return EXIT_OK

    cmd = args[0].lower()

    try:
        settings = get_settings()
    except ValueError as e:
        print(f"Configuration error: {e}")
        return EXIT_PARSE
    logging.basicConfig(
        level=settings.log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        if cmd == "run" and len(args) > 1:
            return run_command(args[1], args[2:])
        if cmd == "scenarios":
            list_scenarios()
            return EXIT_OK
        if cmd == "check":
            slug = args[1] if len(args) > 1 and not args[1].startswith("--") else None
            return check_command(slug, args[1:])
        if cmd == "domain":
            show_domain(args[1:])
            return EXIT_OK
    except (DomainError, ValueError) as e:
        print(f"Error: {e}")
        return EXIT_PARSE

    print(f"Unknown command: {cmd}\n")
    print(USAGE)
    return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
