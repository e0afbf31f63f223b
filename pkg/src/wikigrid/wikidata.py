"""Client for the Wikidata API: entity lookup, claims, labels, fact pairs.

Facts are (predicate, object) string pairs built from an item's claims.
Only properties carrying exactly one value-bearing claim survive — a
property with several values ("head of government" over the years) has no
single indisputable object, so it is dropped rather than guessed at.
Entity and property ids are replaced by their labels in the article's
language, falling back to English, falling back to the raw id.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from wikigrid.core import (
    QualifiedTitle,
    bad_input,
    not_found,
    parse_failure,
    to_request_title,
)
from wikigrid.transport import HttpRequestSpec, Transport, canonical_url

DEFAULT_ENDPOINT = "https://www.wikidata.org/w/api.php"
LABEL_BATCH_SIZE = 50

ENTITY_ID_RE = re.compile(r"^[QP][1-9][0-9]*$")


def valid_entity_id(entity_id: str) -> bool:
    return bool(ENTITY_ID_RE.match(entity_id))


def entity_sort_key(entity_id: str) -> tuple[str, int]:
    """Sort P-ids before Q-ids, each numerically (P6 < P17 < P300)."""
    return entity_id[0], int(entity_id[1:])


@dataclass(frozen=True)
class EntityRef:
    """A claim value that is itself an entity, to be labeled later."""

    id: str


@dataclass(frozen=True)
class FactPair:
    predicate: str
    value: str


def _format_time(value: dict) -> str:
    # Wikidata times look like "+2016-01-13T00:00:00Z"; precision 11 is a
    # day, 10 a month, 9 and below a year (or coarser — rendered as the
    # year, which is the finest honest rendering).
    stamp = value["time"]
    precision = value.get("precision", 11)
    sign = "-" if stamp.startswith("-") else ""
    body = stamp.lstrip("+-").split("T")[0]
    year, month, day = body.rsplit("-", 2)
    if precision >= 11:
        return f"{sign}{year}-{month}-{day}"
    if precision == 10:
        return f"{sign}{year}-{month}"
    return f"{sign}{year}"


def simplify_datavalue(datavalue: dict) -> EntityRef | str:
    """Reduce one datavalue to a string or an entity reference."""
    kind = datavalue.get("type")
    value = datavalue.get("value")
    if kind == "wikibase-entityid":
        entity_id = value.get("id")
        if not entity_id:
            prefix = "P" if value.get("entity-type") == "property" else "Q"
            entity_id = f"{prefix}{value['numeric-id']}"
        return EntityRef(entity_id)
    if kind in ("string", "url"):
        return value
    if kind == "monolingualtext":
        return value["text"]
    if kind == "quantity":
        return value["amount"].removeprefix("+")
    if kind == "time":
        return _format_time(value)
    if kind == "globecoordinate":
        return f"{value['latitude']:.6f},{value['longitude']:.6f}"
    raise parse_failure(f"unrecognized datavalue kind {kind!r}")


def simplify_claims(by_property: Mapping[str, list[dict]]) -> dict[str, EntityRef | str]:
    """Keep only properties with exactly one value-bearing claim.

    somevalue/novalue snaks never count as values; multi-value properties
    disappear entirely.
    """
    simplified: dict[str, EntityRef | str] = {}
    for property_id, claims in by_property.items():
        snaks = [
            claim["mainsnak"]
            for claim in claims
            if claim.get("mainsnak", {}).get("snaktype") == "value"
        ]
        if len(snaks) != 1:
            continue
        datavalue = snaks[0].get("datavalue")
        if datavalue is None:
            raise parse_failure(f"value snak without datavalue on {property_id}")
        simplified[property_id] = simplify_datavalue(datavalue)
    return simplified


class WikidataClient:
    def __init__(self, transport: Transport, endpoint: str = DEFAULT_ENDPOINT):
        self.transport = transport
        self.endpoint = endpoint

    def _get_json(self, params: Mapping[str, str]) -> dict:
        merged = {"action": "wbgetentities", "format": "json"}
        merged.update(params)
        spec = HttpRequestSpec(canonical_url(self.endpoint, merged))
        result = self.transport.fetch(spec)
        try:
            data = json.loads(result.body)
        except ValueError as exc:
            raise parse_failure(f"invalid JSON: {exc}", url=spec.url) from exc
        if "error" in data:
            raise bad_input(f"API error: {data['error'].get('code', 'unknown')}", url=spec.url)
        if "entities" not in data:
            raise parse_failure("response lacks entities", url=spec.url)
        return data

    def entity_for_article(self, article: QualifiedTitle) -> str:
        """The item id connected to a Wikipedia article, e.g. en:Berlin -> Q64."""
        data = self._get_json(
            {
                "sites": f"{article.language}wiki",
                "titles": to_request_title(article),
                "props": "info",
            }
        )
        entities = data["entities"]
        if not entities:
            raise not_found(f"no item connected to {article.qualified()!r}")
        entity = next(iter(entities.values()))
        if "missing" in entity:
            raise not_found(f"no item connected to {article.qualified()!r}")
        entity_id = entity.get("id", "")
        if not valid_entity_id(entity_id):
            raise parse_failure(f"malformed entity id {entity_id!r}")
        return entity_id

    def fetch_claims(self, entity_id: str) -> dict[str, list[dict]]:
        """The raw claim lists of an item, keyed by property id."""
        data = self._get_json({"ids": entity_id, "props": "claims"})
        entity = data["entities"].get(entity_id)
        if entity is None or "missing" in entity:
            raise not_found(f"no such entity {entity_id}")
        return entity.get("claims", {})

    def resolve_labels(self, ids: Iterable[str], language: str) -> dict[str, str]:
        """Labels for entity/property ids: language, then English, then the id."""
        ordered = sorted(set(ids), key=entity_sort_key)
        if not ordered:
            return {}
        languages = language if language == "en" else f"{language}|en"
        labels: dict[str, str] = {}
        for offset in range(0, len(ordered), LABEL_BATCH_SIZE):
            batch = ordered[offset : offset + LABEL_BATCH_SIZE]
            data = self._get_json(
                {"ids": "|".join(batch), "props": "labels", "languages": languages}
            )
            entities = data["entities"]
            for entity_id in batch:
                entry = entities.get(entity_id, {})
                entity_labels = entry.get("labels", {})
                for candidate in (language, "en"):
                    if candidate in entity_labels:
                        labels[entity_id] = entity_labels[candidate]["value"]
                        break
                else:
                    labels[entity_id] = entity_id
        return labels

    def facts(self, article: QualifiedTitle) -> list[FactPair]:
        """Single-valued claims as labeled pairs, sorted by property number."""
        entity_id = self.entity_for_article(article)
        simplified = simplify_claims(self.fetch_claims(entity_id))
        to_label = set(simplified)
        to_label.update(value.id for value in simplified.values() if isinstance(value, EntityRef))
        labels = self.resolve_labels(to_label, article.language)
        pairs: list[FactPair] = []
        seen_predicates: set[str] = set()
        for property_id in sorted(simplified, key=entity_sort_key):
            value = simplified[property_id]
            rendered = labels[value.id] if isinstance(value, EntityRef) else value
            predicate = labels[property_id]
            if not predicate or not rendered:
                continue
            # Distinct properties can share a label; keep the lowest-numbered
            # one so every predicate still has exactly one object.
            if predicate in seen_predicates:
                continue
            seen_predicates.add(predicate)
            pairs.append(FactPair(predicate, rendered))
        return pairs
