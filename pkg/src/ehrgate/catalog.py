"""Attribute taxonomy and view filtering.

Every record attribute carries a set of sharing tags (Basic, Confidential,
Emergency).  A view is produced by restricting a record's values to the
attribute ids visible under that view:

* ``BasicShare`` — Basic-tagged attributes, with Confidential dominating
  (an attribute that is both Basic and Confidential is hidden).
* ``Emergency``  — Emergency-tagged attributes, including confidential ones
  such as HIV status.
* ``Full``       — everything.

The default catalog ships with the package as JSON data and can be replaced
by an external catalog document with the same schema.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from importlib import resources
from typing import Any, Mapping

from .errors import ParseError, UnknownAttribute, ValidationError

HEADINGS = ("bio_data", "common_medical", "psychiatric", "common_surgical", "statuses")
VALUE_KINDS = ("boolean", "enumerated", "text", "integer")


class Tag(str, Enum):
    BASIC = "Basic"
    CONFIDENTIAL = "Confidential"
    EMERGENCY = "Emergency"


class ViewKind(str, Enum):
    BASIC_SHARE = "BasicShare"
    EMERGENCY = "Emergency"
    FULL = "Full"


@dataclass(frozen=True)
class AttributeDef:
    id: str
    heading: str
    display_name: str
    tags: frozenset
    value_kind: str
    enum_values: tuple = None

    def validate(self) -> None:
        if self.heading not in HEADINGS:
            raise ValidationError(f"unknown heading {self.heading!r} for {self.id!r}")
        if not self.tags:
            raise ValidationError(f"attribute {self.id!r} has no tags")
        for t in self.tags:
            if not isinstance(t, Tag):
                raise ValidationError(f"attribute {self.id!r} has invalid tag {t!r}")
        head, sep, name = self.id.partition(".")
        if not sep or head != self.heading or not name:
            raise ValidationError(f"id {self.id!r} does not match heading {self.heading!r}")
        ok = name.replace("_", "").isalnum() and name == name.lower()
        if not ok:
            raise ValidationError(f"id {self.id!r} is not a lowercase slug")
        if self.value_kind not in VALUE_KINDS:
            raise ValidationError(f"bad value_kind {self.value_kind!r} for {self.id!r}")
        if self.value_kind == "enumerated":
            if not self.enum_values:
                raise ValidationError(f"enumerated attribute {self.id!r} needs enum_values")
        elif self.enum_values:
            raise ValidationError(f"{self.id!r} has enum_values but is not enumerated")

    def check_value(self, value) -> None:
        """Raise ValueTypeMismatch if value does not fit value_kind."""
        from .errors import ValueTypeMismatch

        kind = self.value_kind
        if kind == "boolean":
            if not isinstance(value, bool):
                raise ValueTypeMismatch(f"{self.id}: expected boolean, got {value!r}")
        elif kind == "integer":
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValueTypeMismatch(f"{self.id}: expected integer, got {value!r}")
        elif kind == "text":
            if not isinstance(value, str):
                raise ValueTypeMismatch(f"{self.id}: expected text, got {value!r}")
        elif kind == "enumerated":
            if value not in self.enum_values:
                raise ValueTypeMismatch(
                    f"{self.id}: {value!r} not one of {list(self.enum_values)}"
                )


@dataclass(frozen=True)
class AttributeCatalog:
    version: str
    attributes: tuple
    _by_id: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        by_id = {}
        for a in self.attributes:
            a.validate()
            if a.id in by_id:
                raise ValidationError(f"duplicate attribute id {a.id!r}")
            by_id[a.id] = a
        object.__setattr__(self, "_by_id", by_id)

    def __contains__(self, attribute_id: str) -> bool:
        return attribute_id in self._by_id

    def __len__(self) -> int:
        return len(self.attributes)

    def get(self, attribute_id: str) -> AttributeDef:
        try:
            return self._by_id[attribute_id]
        except KeyError:
            raise UnknownAttribute(attribute_id) from None

    def ids(self) -> set:
        return set(self._by_id)

    def to_document(self) -> dict:
        attrs = []
        for a in self.attributes:
            d = {
                "id": a.id,
                "heading": a.heading,
                "display_name": a.display_name,
                "tags": sorted(t.value for t in a.tags),
                "value_kind": a.value_kind,
            }
            if a.enum_values:
                d["enum_values"] = list(a.enum_values)
            attrs.append(d)
        return {"version": self.version, "attributes": attrs}


@dataclass(frozen=True)
class FilteredRecord:
    patient_ref: str
    view: ViewKind
    values: Mapping[str, Any]
    generated_at: datetime


def _attribute_from_dict(d: dict) -> AttributeDef:
    try:
        tags = frozenset(Tag(t) for t in d["tags"])
    except ValueError as e:
        raise ValidationError(str(e)) from None
    except (KeyError, TypeError) as e:
        raise ParseError(f"bad attribute entry: {e}") from None
    try:
        return AttributeDef(
            id=d["id"],
            heading=d.get("heading", str(d["id"]).partition(".")[0]),
            display_name=d.get("display_name", d["id"]),
            tags=tags,
            value_kind=d["value_kind"],
            enum_values=tuple(d["enum_values"]) if d.get("enum_values") else None,
        )
    except KeyError as e:
        raise ParseError(f"attribute entry missing field {e}") from None


def load_catalog(source="default") -> AttributeCatalog:
    """Load and validate a catalog.

    ``source`` may be the token ``"default"`` (the embedded catalog), a path
    to a JSON document, a JSON string, or an already-parsed mapping.
    """
    if source == "default":
        doc = json.loads(
            resources.files("ehrgate.data").joinpath("default_catalog.json").read_text()
        )
    elif isinstance(source, Mapping):
        doc = source
    else:
        text = None
        if isinstance(source, (str, os.PathLike)) and os.path.exists(source):
            with open(source) as f:
                text = f.read()
        elif isinstance(source, str):
            text = source
        else:
            raise ParseError(f"unreadable catalog source {source!r}")
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"malformed catalog document: {e}") from None
    if not isinstance(doc, Mapping) or "attributes" not in doc:
        raise ParseError("catalog document must be an object with an 'attributes' list")
    attrs = tuple(_attribute_from_dict(d) for d in doc["attributes"])
    return AttributeCatalog(version=str(doc.get("version", "0")), attributes=attrs)


def tags_of(catalog: AttributeCatalog, attribute_id: str) -> frozenset:
    return catalog.get(attribute_id).tags


def visible_attributes(catalog: AttributeCatalog, view: ViewKind) -> set:
    """Attribute ids visible under a view.

    BasicShare applies Confidential-dominates precedence: dual-tagged
    attributes stay hidden when a record is shared externally.
    """
    if view is ViewKind.FULL:
        return catalog.ids()
    if view is ViewKind.EMERGENCY:
        return {a.id for a in catalog.attributes if Tag.EMERGENCY in a.tags}
    if view is ViewKind.BASIC_SHARE:
        return {
            a.id
            for a in catalog.attributes
            if Tag.BASIC in a.tags and Tag.CONFIDENTIAL not in a.tags
        }
    raise ValueError(f"unknown view {view!r}")


def filter_view(
    catalog: AttributeCatalog,
    record_values: Mapping[str, Any],
    patient_ref: str,
    view: ViewKind,
) -> FilteredRecord:
    """Restrict record values to the attributes visible under ``view``.

    Values are never altered, only dropped.
    """
    for key in record_values:
        if key not in catalog:
            raise UnknownAttribute(key)
    visible = visible_attributes(catalog, view)
    kept = {k: v for k, v in record_values.items() if k in visible}
    return FilteredRecord(
        patient_ref=patient_ref,
        view=view,
        values=kept,
        generated_at=datetime.now(timezone.utc),
    )
