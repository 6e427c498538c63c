import pytest

from lqm_eval.errors import TaxonomyError
from lqm_eval.taxonomy import (TaxonomyPath, load_taxonomy, serialize_taxonomy)

# The 34 observed diagnostic paths (category, error type, subcategory or
# None for terminal error types) with their corpus-wide span counts.
OBSERVED_ROWS = [
    (("sociolinguistics", "code-register-selection", "standardization-interference"), 904),
    (("semantics", "lexical-semantics", "named-entity"), 572),
    (("sociolinguistics", "code-register-selection", "wrong-dialect"), 539),
    (("semantics", "lexical-semantics", "coverage"), 365),
    (("semantics", "propositional-semantics", "omission"), 357),
    (("semantics", "lexical-semantics", "unidiomatic-style"), 322),
    (("morphosyntax", "grammar", "verbal-features"), 295),
    (("semantics", "lexical-semantics", "awkward-style"), 292),
    (("pragmatics", "use-context-cultural-appropriateness", "mwes-proverbs"), 289),
    (("semantics", "discourse-semantics", "pronouns"), 268),
    (("semantics", "propositional-semantics", "addition"), 263),
    (("semantics", "lexical-semantics", "cross-variety-interference"), 246),
    (("semantics", "lexical-semantics", "wrong-term"), 192),
    (("semantics", "propositional-semantics", "hallucination"), 190),
    (("semantics", "lexical-semantics", "undertranslation"), 130),
    (("orthography-writing-conventions", "spelling", "typo-slip"), 125),
    (("semantics", "lexical-semantics", "polysemy-failure"), 120),
    (("semantics", "lexical-semantics", "transliteration"), 115),
    (("pragmatics", "use-context-cultural-appropriateness", "speech-acts"), 104),
    (("pragmatics", "use-context-cultural-appropriateness", "forms-of-address"), 97),
    (("semantics", "lexical-semantics", "overtranslation"), 66),
    (("semantics", "propositional-semantics", "untranslated"), 57),
    (("semantics", "discourse-semantics", "terminology-resource"), 47),
    (("pragmatics", "use-context-cultural-appropriateness", "discourse-marker-mismatch"), 35),
    (("sociolinguistics", "code-register-selection", "register-mismatch"), 31),
    (("morphosyntax", "grammar", "nominal-features"), 30),
    (("pragmatics", "use-context-cultural-appropriateness", "code-switching"), 19),
    (("semantics", "discourse-semantics", "inconsistent-style"), 15),
    (("orthography-writing-conventions", "surface-mechanics", "currency-format"), 9),
    (("orthography-writing-conventions", "punctuation", None), 8),
    (("semantics", "lexical-semantics", "unintelligible"), 5),
    (("graphetics", "character-encoding", None), 4),
    (("orthography-writing-conventions", "surface-mechanics", "number-format"), 1),
    (("semantics", "discourse-semantics", "inconsistent-terminology"), 1),
]

assert sum(count for _, count in OBSERVED_ROWS) == 6113
assert len(OBSERVED_ROWS) == 34


def test_builtin_lqm_has_six_categories(lqm_schema):
    assert [r.id for r in lqm_schema.roots] == [
        "sociolinguistics", "pragmatics", "semantics", "morphosyntax",
        "orthography-writing-conventions", "graphetics",
    ]
    assert lqm_schema.levels == [r.id for r in lqm_schema.roots]


def test_single_category_single_leaf_file():
    schema = load_taxonomy(
        "name: tiny\n"
        "node: cat\nlabel: Cat\ndepth: 1\ndefinition: d\n"
        "node: leaf\nlabel: Leaf\ndepth: 2\nparent: cat\ndefinition: d\n")
    assert len(schema) == 2
    assert schema.node("leaf").depth == 2
    assert schema.enumerate_leaves("diagnostic") == [TaxonomyPath("cat", "leaf")]


def test_self_cycle_is_an_error():
    with pytest.raises(TaxonomyError, match="cycle"):
        load_taxonomy(
            "node: a\nlabel: A\ndepth: 1\ndefinition: d\n"
            "node: b\nlabel: B\ndepth: 2\nparent: b\ndefinition: d\n")


def test_duplicate_id_orphan_and_bad_depth():
    with pytest.raises(TaxonomyError, match="duplicate"):
        load_taxonomy("node: a\ndepth: 1\nnode: a\ndepth: 1\n")
    with pytest.raises(TaxonomyError, match="orphan"):
        load_taxonomy(
            "node: a\ndepth: 1\nnode: b\ndepth: 2\nparent: missing\n")
    with pytest.raises(TaxonomyError, match="depth"):
        load_taxonomy("node: a\ndepth: 4\n")
    with pytest.raises(TaxonomyError, match="depth"):
        load_taxonomy(
            "node: a\ndepth: 1\nnode: b\ndepth: 3\nparent: a\n")


def test_validate_path_examples(lqm_schema):
    ok = lqm_schema.validate_path(
        TaxonomyPath("semantics", "lexical-semantics", "named-entity"))
    assert ok.valid and ok.diagnostic_complete and ok.lightweight_complete

    terminal = lqm_schema.validate_path(
        TaxonomyPath("graphetics", "character-encoding"))
    assert terminal.valid and terminal.diagnostic_complete

    broken = lqm_schema.validate_path(TaxonomyPath("semantics", "grammar"))
    assert not broken.valid
    assert "not a child" in broken.problem

    unknown = lqm_schema.validate_path(TaxonomyPath("nonsense"))
    assert not unknown.valid and "unknown" in unknown.problem


def test_validate_path_rejects_wrong_slot(lqm_schema):
    result = lqm_schema.validate_path(TaxonomyPath("lexical-semantics"))
    assert not result.valid


def test_incomplete_paths_report_completeness(lqm_schema):
    category_only = lqm_schema.validate_path(TaxonomyPath("semantics"))
    assert category_only.valid
    assert not category_only.lightweight_complete
    assert not category_only.diagnostic_complete

    light = lqm_schema.validate_path(
        TaxonomyPath("semantics", "lexical-semantics"))
    assert light.valid and light.lightweight_complete
    assert not light.diagnostic_complete


def test_enumerate_leaves_lightweight(lqm_schema):
    light = lqm_schema.enumerate_leaves("lightweight")
    assert TaxonomyPath("sociolinguistics", "code-register-selection") in light
    assert len(light) == 13


def test_enumerate_leaves_diagnostic(lqm_schema):
    diag = lqm_schema.enumerate_leaves("diagnostic")
    under = [p for p in diag
             if p.error_type == "code-register-selection"]
    assert len(under) == 3
    assert len(diag) == 41


def test_childless_error_type_in_both_layers(lqm_schema):
    punct = TaxonomyPath("orthography-writing-conventions", "punctuation")
    assert punct in lqm_schema.enumerate_leaves("lightweight")
    assert punct in lqm_schema.enumerate_leaves("diagnostic")


def test_serialize_round_trip(lqm_schema, mqm_schema):
    for schema in (lqm_schema, mqm_schema):
        reparsed = load_taxonomy(serialize_taxonomy(schema))
        assert reparsed.to_dict() == schema.to_dict()


def test_every_valid_path_is_enumerable(lqm_schema, mqm_schema):
    # every layer-complete path accepted by validate_path appears in the
    # enumeration of at least one layer
    for schema in (lqm_schema, mqm_schema):
        enumerable = set()
        for layer in ("lightweight", "diagnostic"):
            enumerable.update(schema.enumerate_leaves(layer))
        for node_id in list(schema._by_id):
            path = schema.path_for(node_id)
            result = schema.validate_path(path)
            assert result.valid
            if result.lightweight_complete or result.diagnostic_complete:
                assert path in enumerable, path


def test_diagnostic_leaves_superset_of_observed_rows(lqm_schema):
    diag = set(lqm_schema.enumerate_leaves("diagnostic"))
    for (category, error_type, subcategory), _ in OBSERVED_ROWS:
        path = TaxonomyPath(category, error_type, subcategory)
        result = lqm_schema.validate_path(path)
        assert result.valid and result.diagnostic_complete, path
        assert path in diag


def test_lexical_semantics_has_twelve_subcategories(lqm_schema):
    assert len(lqm_schema.node("lexical-semantics").children) == 12


def test_mqm_is_two_levels(mqm_schema):
    assert [r.id for r in mqm_schema.roots] == [
        "accuracy", "fluency", "style", "terminology", "locale-convention"]
    assert all(n.depth <= 2 for n in mqm_schema._by_id.values())
    assert (mqm_schema.enumerate_leaves("lightweight")
            == mqm_schema.enumerate_leaves("diagnostic"))


def test_levels_header_must_match_roots():
    with pytest.raises(TaxonomyError, match="levels"):
        load_taxonomy("levels: b\nnode: a\ndepth: 1\n")


def test_unknown_layer_rejected(lqm_schema):
    with pytest.raises(TaxonomyError, match="layer"):
        lqm_schema.enumerate_leaves("medium")
