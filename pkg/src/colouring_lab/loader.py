import json
import logging
from pathlib import Path
from typing import Any, TextIO, Union

from .cover import canonical_cover
from .documents import GraphDocument, InstanceDocument, LotteryDocument, parse_document
from .models import Cover, Graph, ListAssignment, LotteryInstance, as_json_ready
from .validation import DocumentError

logger = logging.getLogger(__name__)

Source = Union[str, Path, TextIO]


def _read_content(source: Source) -> str:
    """Helper to read content from file path or file object."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as f:
            return f.read()
    if hasattr(source, "read"):
        return source.read()
    raise ValueError(f"Invalid source type: {type(source)}")


def _load_json(source: Source) -> Any:
    content = _read_content(source)
    try:
        return json.loads(content)
    except json.JSONDecodeError as e:
        raise DocumentError([f"Invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}"]) from e


def load_graph(source: Source) -> Graph:
    """
    Load a graph document.

    Args:
        source: File path (str/Path) or file-like object.

    Raises:
        DocumentError: If the file is not valid JSON or not a graph document.
    """
    doc = parse_document(_load_json(source), GraphDocument)
    return doc.to_graph()


def load_document(source: Source) -> InstanceDocument:
    """
    Load a list-colouring or cover instance document without converting it.
    """
    return parse_document(_load_json(source), InstanceDocument)


def load_instance(source: Source) -> tuple[Graph, ListAssignment]:
    """
    Load a list-colouring instance (graph plus lists). Matchings, if present, are ignored.
    """
    doc = load_document(source)
    return doc.to_graph(), doc.to_lists()


def load_cover(source: Source) -> Cover:
    """
    Load a cover. Documents without matchings yield the canonical cover of
    their lists. The cover is not structurally validated here; see
    `cover.validate_cover`.
    """
    doc = load_document(source)
    if not doc.is_cover:
        logger.debug("Instance has no matchings; using the canonical cover")
        return canonical_cover(doc.to_graph(), doc.to_lists())
    return doc.to_cover()


def load_lottery(source: Source) -> LotteryInstance:
    doc = parse_document(_load_json(source), LotteryDocument)
    try:
        return doc.to_instance()
    except ValueError as e:
        raise DocumentError([str(e)]) from e


def dump_json(value: Any) -> str:
    """
    Canonical JSON text: sorted keys, two-space indent, trailing newline.
    """
    return json.dumps(as_json_ready(value), indent=2, sort_keys=True) + "\n"
