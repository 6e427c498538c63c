import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lqm_eval.corpus import Corpus, ErrorSpan, read_segments
from lqm_eval.taxonomy import TaxonomyPath, load_builtin

DIAGNOSTIC_PATHS = [
    ("sociolinguistics", "code-register-selection", "standardization-interference"),
    ("sociolinguistics", "code-register-selection", "wrong-dialect"),
    ("pragmatics", "use-context-cultural-appropriateness", "mwes-proverbs"),
    ("semantics", "lexical-semantics", "named-entity"),
    ("semantics", "lexical-semantics", "wrong-term"),
    ("semantics", "propositional-semantics", "omission"),
    ("semantics", "discourse-semantics", "pronouns"),
    ("morphosyntax", "grammar", "verbal-features"),
    ("orthography-writing-conventions", "spelling", "typo-slip"),
    ("graphetics", "character-encoding", None),
]


@pytest.fixture(scope="session")
def lqm_schema():
    return load_builtin("lqm")


@pytest.fixture(scope="session")
def mqm_schema():
    return load_builtin("mqm")


def make_segment_record(segment_id, n_tokens=10, model_id="m1",
                        source_lang="EGY", target_lang="ENG",
                        dialect="Egyptian", reference_text=None,
                        target_text=None):
    if target_text is None:
        target_text = " ".join(f"w{i}" for i in range(n_tokens))
    rec = {
        "segment_id": segment_id,
        "source_lang": source_lang,
        "target_lang": target_lang,
        "dialect": dialect,
        "model_id": model_id,
        "source_text": f"src of {segment_id}",
        "target_text": target_text,
    }
    if reference_text is not None:
        rec["reference_text"] = reference_text
    return rec


def corpus_from_records(records) -> Corpus:
    jsonl = "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records)
    return Corpus(read_segments(jsonl))


def make_span(span_id, segment_id, start, end, severity="minor",
              annotator_id="A", path=None, note=None) -> ErrorSpan:
    if path is None:
        path = DIAGNOSTIC_PATHS[0]
    return ErrorSpan(
        span_id=span_id,
        segment_id=segment_id,
        annotator_id=annotator_id,
        start=start,
        end=end,
        path=TaxonomyPath(*path),
        severity=severity,
        note=note,
    )


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    seen = {}
    for status in ("passed", "failed", "skipped"):
        for report in terminalreporter.stats.get(status, []):
            if ("test_acceptance" in report.nodeid
                    and report.when in ("call", "setup")):
                name = report.nodeid.split("::")[-1]
                seen.setdefault(name, status.upper())
    if seen:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for name, status in seen.items():
            terminalreporter.write_line(f"  {name}: {status}")
