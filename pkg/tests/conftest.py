import json
import math
import pathlib
import random

import pytest

CASES_DIR = pathlib.Path(__file__).resolve().parent.parent / "cases"


def close(value, expected, rel=0.005, abs_tol=0.0):
    """Within ``rel`` relative or ``abs_tol`` absolute of the expected value."""
    return math.isclose(value, expected, rel_tol=rel, abs_tol=abs_tol)


@pytest.fixture
def rng():
    return random.Random(20240817)


def load_case(name):
    with open(CASES_DIR / f"{name}.json", "r", encoding="utf-8") as fh:
        return json.load(fh)


def resolve_path(report, path):
    head, *rest = path.split(".")
    node = report["results"][head]["value"]
    for key in rest:
        node = node[int(key)] if isinstance(node, list) else node[key]
    return node


def check_case(name):
    """Run a shipped case and assert every expectation it carries."""
    from vlsidesk import cli

    case = load_case(name)
    report = cli.run_case(case)
    for path, spec in case["meta"]["expect"].items():
        got = resolve_path(report, path)
        want = spec["value"]
        if isinstance(want, (int, float)) and not isinstance(want, bool) \
                and ("rel" in spec or "abs" in spec):
            assert close(got, want, rel=spec.get("rel", 0.0),
                         abs_tol=spec.get("abs", 0.0)), \
                f"{name}:{path} = {got}, want {want} ({spec})"
        else:
            assert got == want, f"{name}:{path} = {got!r}, want {want!r}"
    return report
