"""Workspace files: named quivers, algebras, bimodules and representations.

A workspace is one JSON object with optional sections ``quivers``, ``algebras``,
``bimodules`` and ``representations``.  Cross references are names from the same
file or inline objects.  Every problem is reported as an :class:`InputError`
naming the JSON location.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Any, Mapping

from .algebra import (
    Algebra,
    AlgebraError,
    bound_quiver_algebra,
    field_algebra,
    from_structure_constants,
    path_algebra_over,
    triangular_extension,
    truncated_polynomial,
)
from .exactlin import Field
from .modules import Bimodule, ModuleError
from .quiver import BoundQuiverPresentation, Quiver, QuiverError, RelationElement, path_from_json, path_to_json
from .repmod import Representation, RepresentationError, validate


class InputError(ValueError):
    def __init__(self, where: str, message: str) -> None:
        super().__init__(f"{where}: {message}")
        self.where = where
        self.message = message


def field_from_json(doc: Any, where: str) -> Field:
    try:
        p = int(doc["char"])
        return Field(None if p == 0 else p)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(where, f"bad field {doc!r} ({exc})") from None


def field_to_json(f: Field) -> dict:
    return {"char": 0 if f.p is None else f.p}


def relation_from_json(q: Quiver, doc: Any, where: str) -> RelationElement:
    try:
        terms = tuple((t["coef"], path_from_json(q, t["path"])) for t in doc)
        return RelationElement(terms)
    except (KeyError, TypeError, ValueError, AssertionError) as exc:
        raise InputError(where, f"bad relation ({exc})") from None


def relation_to_json(q: Quiver, rel: RelationElement) -> list:
    return [{"coef": c if isinstance(c, int) else str(c), "path": path_to_json(q, p)} for c, p in rel.terms]


def presentation_to_json(pres: BoundQuiverPresentation) -> dict:
    return {
        "quiver": pres.quiver.to_json(),
        "relations": [relation_to_json(pres.quiver, r) for r in pres.relations],
        "nilpotency_bound": pres.nilpotency_bound,
    }


@dataclass
class Workspace:
    doc: dict
    source: str = "<memory>"
    quivers: dict[str, Quiver] = field(default_factory=dict)
    algebras: dict[str, Algebra] = field(default_factory=dict)
    bimodules: dict[str, Bimodule] = field(default_factory=dict)
    representations: dict[str, Representation] = field(default_factory=dict)
    presentations: dict[str, BoundQuiverPresentation] = field(default_factory=dict)

    # -- resolution --------------------------------------------------------

    def _section(self, name: str) -> Mapping:
        sec = self.doc.get(name, {})
        if not isinstance(sec, Mapping):
            raise InputError(name, "expected an object of named entries")
        return sec

    def quiver(self, ref: Any, where: str) -> Quiver:
        if isinstance(ref, str):
            if ref in self.quivers:
                return self.quivers[ref]
            sec = self._section("quivers")
            if ref not in sec:
                raise InputError(where, f"unknown quiver {ref!r}")
            self.quivers[ref] = self.quiver(sec[ref], f"quivers.{ref}")
            return self.quivers[ref]
        try:
            return Quiver.from_json(ref)
        except (KeyError, TypeError, ValueError, QuiverError) as exc:
            raise InputError(where, f"bad quiver ({exc})") from None

    def presentation(self, ref: Any, where: str) -> BoundQuiverPresentation:
        """A quiver with optional relations and nilpotency bound."""
        if isinstance(ref, str):
            sec = self._section("quivers")
            if ref not in sec:
                raise InputError(where, f"unknown quiver {ref!r}")
            ref = sec[ref]
        if isinstance(ref, Mapping) and "quiver" in ref:
            q = self.quiver(ref["quiver"], f"{where}.quiver")
            rels = [relation_from_json(q, r, f"{where}.relations[{k}]") for k, r in enumerate(ref.get("relations", []))]
            bound = ref.get("nilpotency_bound")
            return BoundQuiverPresentation(q, tuple(rels), bound)
        return BoundQuiverPresentation(self.quiver(ref, where), (), None)

    def algebra(self, ref: Any, where: str) -> Algebra:
        if isinstance(ref, str):
            if ref in self.algebras:
                return self.algebras[ref]
            sec = self._section("algebras")
            if ref not in sec:
                raise InputError(where, f"unknown algebra {ref!r}")
            self.algebras[ref] = self.algebra(sec[ref], f"algebras.{ref}")
            return self.algebras[ref]
        if not isinstance(ref, Mapping):
            raise InputError(where, "expected an algebra object or name")
        kind = ref.get("type")
        try:
            if kind == "truncated_poly":
                return truncated_polynomial(field_from_json(ref.get("field"), f"{where}.field"), int(ref["n"]))
            if kind == "field":
                return field_algebra(field_from_json(ref.get("field"), f"{where}.field"))
            if kind == "structure_constants":
                fld = field_from_json(ref.get("field"), f"{where}.field")
                return from_structure_constants(
                    fld, int(ref["dim"]), ref["table"], ref["unit"],
                    idempotents=ref.get("idempotents"), radical=ref.get("radical"), labels=ref.get("labels"),
                )
            if kind == "bound_quiver":
                fld = field_from_json(ref.get("field"), f"{where}.field")
                pres = self.presentation(ref, where)
                return bound_quiver_algebra(pres, fld)
            if kind == "path_algebra_over":
                base = self.algebra(ref["base"], f"{where}.base")
                return path_algebra_over(base, self.quiver(ref["quiver"], f"{where}.quiver"))
            if kind == "triangular":
                a = self.algebra(ref["a"], f"{where}.a")
                b = self.algebra(ref["b"], f"{where}.b")
                return triangular_extension(a, b, self.bimodule(ref["bimodule"], f"{where}.bimodule", a, b))
        except InputError:
            raise
        except (KeyError, TypeError) as exc:
            raise InputError(where, f"missing or malformed field {exc}") from None
        except (AlgebraError, QuiverError, ModuleError, ValueError) as exc:
            raise InputError(where, str(exc)) from None
        raise InputError(where, f"unknown algebra type {kind!r}")

    def bimodule(self, ref: Any, where: str, a: Algebra | None = None, b: Algebra | None = None) -> Bimodule:
        if isinstance(ref, str):
            if ref in self.bimodules:
                return self.bimodules[ref]
            sec = self._section("bimodules")
            if ref not in sec:
                raise InputError(where, f"unknown bimodule {ref!r}")
            self.bimodules[ref] = self.bimodule(sec[ref], f"bimodules.{ref}", a, b)
            return self.bimodules[ref]
        try:
            left = a if a is not None else self.algebra(ref["left_algebra"], f"{where}.left_algebra")
            right = b if b is not None else self.algebra(ref["right_algebra"], f"{where}.right_algebra")
            return Bimodule.from_json(left, right, ref)
        except InputError:
            raise
        except (KeyError, TypeError, ValueError, ModuleError, AlgebraError) as exc:
            raise InputError(where, f"bad bimodule ({exc})") from None

    def representation(self, name: str) -> Representation:
        if name in self.representations:
            return self.representations[name]
        sec = self._section("representations")
        if name not in sec:
            raise InputError("representations", f"unknown representation {name!r}")
        where = f"representations.{name}"
        doc = sec[name]
        if not isinstance(doc, Mapping):
            raise InputError(where, "expected an object")
        if "algebra" not in doc or "quiver" not in doc:
            raise InputError(where, "a representation needs 'algebra' and 'quiver'")
        a = self.algebra(doc["algebra"], f"{where}.algebra")
        q = self.quiver(doc["quiver"], f"{where}.quiver")
        try:
            x = Representation.from_json(a, q, doc)
        except (RepresentationError, ModuleError, ValueError) as exc:
            raise InputError(where, str(exc)) from None
        problem = validate(x)
        if problem:
            raise InputError(where, f"not a representation: {problem}")
        self.representations[name] = x
        return x

    def names(self, section: str) -> list[str]:
        return sorted(self._section(section))

    def pick(self, section: str, name: str | None) -> str:
        names = self.names(section)
        if name is not None:
            if name not in names:
                raise InputError(section, f"no entry named {name!r}")
            return name
        if len(names) != 1:
            raise InputError(section, f"expected exactly one entry, found {names}; choose one by name")
        return names[0]

    def resolve_all(self) -> None:
        """Resolve every named entry so reference errors surface before any command."""
        for n in self.names("quivers"):
            self.quiver(n, "quivers")
        for n in self.names("algebras"):
            self.algebra(n, "algebras")
        for n in self.names("representations"):
            self.representation(n)


def load_workspace(path: str | FsPath) -> tuple[Workspace, str]:
    """Workspace from a file and the sha256 of its bytes."""
    p = FsPath(path)
    try:
        data = p.read_bytes()
    except OSError as exc:
        raise InputError(str(path), f"cannot read file ({exc.strerror})") from None
    digest = hashlib.sha256(data).hexdigest()
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise InputError(f"{p.name}:{exc.lineno}:{exc.colno}", exc.msg) from None
    except UnicodeDecodeError as exc:
        raise InputError(p.name, f"not UTF-8 text ({exc.reason})") from None
    if not isinstance(doc, dict):
        raise InputError(p.name, "top level must be a JSON object")
    return Workspace(doc, p.name), digest
