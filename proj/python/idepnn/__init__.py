"""Cross-sentence relation extraction over dependency paths."""

from ._idepnn import (
    Corpus,
    DataError,
    InternalError,
    Model,
    RelationSchema,
    ensemble,
    evaluate,
    fixture_schema,
    generate_candidates,
    generate_fixture,
    grad_check,
    import_standoff_document,
    load_jsonl,
    load_jsonl_text,
    load_model,
    load_schema,
    parse_conllu_document,
    predict,
    sample_negatives,
    save_jsonl,
    schema_from_json,
    shortest_path_info,
    split_corpus,
    threshold_filter,
    train,
)

__all__ = [
    "Corpus",
    "DataError",
    "InternalError",
    "Model",
    "RelationSchema",
    "ensemble",
    "evaluate",
    "fixture_schema",
    "generate_candidates",
    "generate_fixture",
    "grad_check",
    "import_standoff_document",
    "load_jsonl",
    "load_jsonl_text",
    "load_model",
    "load_schema",
    "parse_conllu_document",
    "predict",
    "sample_negatives",
    "save_jsonl",
    "schema_from_json",
    "shortest_path_info",
    "split_corpus",
    "threshold_filter",
    "train",
]
