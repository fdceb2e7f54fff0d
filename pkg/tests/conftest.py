import json
import sys
from pathlib import Path

import pytest

from quadkit.model import DomainTaxonomy, Quad, load_taxonomy, package_resource

DATA = Path(__file__).parent / "data"

TV_APP_TEXT = "My new TV never breaks down, but I think that the app store is too expensive."
TV_QUAD = Quad("TV", "reliability", "positive", "My new TV never breaks down")
APP_QUAD = Quad("app store", "price", "negative", "the app store is too expensive")
COST_TEXT = "I use the service for 1 year, and the cost? Don't even ask me"


@pytest.fixture(scope="session")
def ps_taxonomy() -> DomainTaxonomy:
    return load_taxonomy(package_resource("taxonomies", "ps_example.json"))


@pytest.fixture
def make_taxonomy():
    def make(domain_id="D", labels=("price", "reliability"), arity="quad"):
        return DomainTaxonomy(
            domain_id=domain_id,
            system_prompt=f"system prompt for {domain_id}",
            categories=[(l, f"about {l}") for l in labels],
            one_shot_text="The price is fine.",
            one_shot_quads=[Quad("price", labels[0], "positive", "The price is fine" if arity == "quad" else "")],
            arity=arity,
        )

    return make


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=False) + "\n")
    return path


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
