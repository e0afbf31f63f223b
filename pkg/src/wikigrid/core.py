"""Shared domain types: qualified titles and the error taxonomy.

Articles and categories are addressed as ``language:Title``, for example
``en:Berlin`` or ``en:Category:Visitor attractions in Montreal``. The split
happens at the *first* colon only, so category titles (which contain their
own colon) survive intact. Titles are stored in human form (spaces, never
underscores); the underscore request form is derived only when a URL is
built.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

LANGUAGE_RE = re.compile(r"^[a-z][a-z0-9-]{1,11}$")

# Namespace prefixes treated as a category page. MediaWiki localizes the
# namespace per wiki; ``Category`` is valid everywhere, the rest cover the
# most common localizations. Extendable per call for other wikis.
CATEGORY_PREFIXES: tuple[str, ...] = ("Category", "Kategorie", "Catégorie", "Categoría")

_NAMESPACE_LIKE_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_-]*$")
_WHITESPACE_RE = re.compile(r"\s")


class ErrorKind(str, Enum):
    BAD_INPUT = "BadInput"
    NETWORK = "Network"
    UPSTREAM_STATUS = "UpstreamStatus"
    PARSE_FAILURE = "ParseFailure"
    NOT_FOUND = "NotFound"
    RATE_LIMITED = "RateLimited"


class ToolkitError(Exception):
    """Any failure the toolkit reports, tagged with a machine-readable kind.

    ``detail`` is human-readable; for ``UPSTREAM_STATUS`` it names the HTTP
    status code, which is also available as ``status``. ``url`` is set when
    the failure is tied to a concrete request. ``offset`` is set only by the
    formula parser (0-based character offset of the first invalid token).
    """

    def __init__(
        self,
        kind: ErrorKind,
        detail: str,
        url: str | None = None,
        status: int | None = None,
        offset: int | None = None,
    ):
        super().__init__(f"{kind.value}: {detail}")
        self.kind = kind
        self.detail = detail
        self.url = url
        self.status = status
        self.offset = offset


def bad_input(detail: str, url: str | None = None) -> ToolkitError:
    return ToolkitError(ErrorKind.BAD_INPUT, detail, url=url)


def not_found(detail: str, url: str | None = None) -> ToolkitError:
    return ToolkitError(ErrorKind.NOT_FOUND, detail, url=url)


def parse_failure(detail: str, url: str | None = None, offset: int | None = None) -> ToolkitError:
    return ToolkitError(ErrorKind.PARSE_FAILURE, detail, url=url, offset=offset)


class NamespaceHint(str, Enum):
    ARTICLE = "article"
    CATEGORY = "category"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class QualifiedTitle:
    """A ``language:Title`` pair naming one page on one wiki."""

    language: str
    title: str
    namespace_hint: NamespaceHint = NamespaceHint.ARTICLE

    @property
    def is_category(self) -> bool:
        return self.namespace_hint is NamespaceHint.CATEGORY

    def qualified(self) -> str:
        """The printable ``language:Title`` form; inverse of parse_qualified."""
        return f"{self.language}:{self.title}"


def valid_language(code: str) -> bool:
    return bool(LANGUAGE_RE.match(code))


def _hint_for(title: str, category_prefixes: tuple[str, ...]) -> NamespaceHint:
    prefix, sep, _rest = title.partition(":")
    if not sep:
        return NamespaceHint.ARTICLE
    if prefix in category_prefixes:
        return NamespaceHint.CATEGORY
    # A single colon-terminated word could be any other namespace
    # (Talk:, File:, ...); a prefix containing spaces is treated as part of
    # an ordinary title ("Star Wars: Episode IV").
    if _NAMESPACE_LIKE_RE.match(prefix):
        return NamespaceHint.UNKNOWN
    return NamespaceHint.ARTICLE


def make_qualified(
    language: str,
    title: str,
    extra_category_prefixes: tuple[str, ...] = (),
) -> QualifiedTitle:
    """Validate and build a QualifiedTitle from its two components."""
    if not valid_language(language):
        raise bad_input(f"invalid language code {language!r}")
    if not title:
        raise bad_input("empty title")
    if title != title.strip():
        raise bad_input(f"title has leading or trailing whitespace: {title!r}")
    prefixes = CATEGORY_PREFIXES + tuple(extra_category_prefixes)
    return QualifiedTitle(language, title, _hint_for(title, prefixes))


def parse_qualified(text: str, extra_category_prefixes: tuple[str, ...] = ()) -> QualifiedTitle:
    """Parse ``language:Title``, splitting at the first colon only.

    The title may itself contain colons (``en:Category:Berlin``). Raises
    BadInput when the colon, the language or the title is missing.
    """
    language, sep, title = text.partition(":")
    if not sep:
        raise bad_input(f"expected language:Title, got {text!r}")
    if not language:
        raise bad_input(f"empty language code in {text!r}")
    if not title:
        raise bad_input(f"empty title in {text!r}")
    return make_qualified(language, title, extra_category_prefixes)


def to_request_title(q: QualifiedTitle) -> str:
    """The URL request form: every whitespace character becomes ``_``.

    Percent-encoding is the transport layer's job, not done here.
    """
    return _WHITESPACE_RE.sub("_", q.title)
