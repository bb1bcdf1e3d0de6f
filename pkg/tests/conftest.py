import logging

from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")

# transport and detection warn about near-singular configurations; tests assert on results instead
logging.getLogger("cohmatch").setLevel(logging.ERROR)


def pytest_terminal_summary(terminalreporter):
    rows = []
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            props = dict(getattr(rep, "user_properties", []))
            if "criterion" in props and rep.when == "call":
                rows.append((props["criterion"], props.get("title", ""), rep.outcome, props.get("summary", "")))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, outcome, summary in sorted(rows):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {n:2d}. {title}  {summary}".rstrip())
