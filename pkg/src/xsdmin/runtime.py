"""Support classes imported by generated binding modules."""

from __future__ import annotations

import enum

from .codec import InstanceTree
from .schema import QualifiedName


class BoundEnum(enum.IntEnum):
    """Enumeration whose integer value is the wire index."""

    def __new__(cls, wire, readable):
        obj = int.__new__(cls, wire)
        obj._value_ = wire
        obj.readable = readable
        return obj

    @classmethod
    def from_readable(cls, readable: str):
        for item in cls:
            if item.readable == readable:
                return item
        raise ValueError(f"{readable!r} is not a value of {cls.__name__}")


class BoundObject:
    """Base for generated classes. ``_members`` rows are
    ``(readable, wire, kind, type, min, max, namespace)``."""

    __slots__ = ("_any",)
    _type_name = ""
    _members: tuple = ()
    _registry = None

    def __init__(self, **fields):
        for row in self._members:
            setattr(self, "_" + row[1], [] if row[5] is None or row[5] > 1 else None)
        self._any = []
        for name, value in fields.items():
            if not hasattr(type(self), name):
                raise TypeError(f"{type(self).__name__} has no member '{name}'")
            setattr(self, name, value)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return all(getattr(self, "_" + r[1]) == getattr(other, "_" + r[1]) for r in self._members) \
            and self._any == other._any

    def __repr__(self):
        parts = []
        for row in self._members:
            value = getattr(self, "_" + row[1])
            if value not in (None, []):
                parts.append(f"{row[0]}={value!r}")
        return f"{type(self).__name__}({', '.join(parts)})"

    @classmethod
    def from_tree(cls, tree: InstanceTree) -> BoundObject:
        reg = cls._registry
        obj = cls()
        by_name = {r[0]: r for r in cls._members}
        for name, value in tree.attributes:
            row = by_name[name.rpartition("}")[2]]
            setattr(obj, "_" + row[1], reg.scalar_in(row[3], value))
        if tree.text is not None:
            row = next(r for r in cls._members if r[2] == "text_content")
            setattr(obj, "_" + row[1], reg.scalar_in(row[3], tree.text))
        for child in tree.children:
            row = by_name.get(child.element.local)
            if row is None or row[2] != "child_element":
                obj._any.append(child)
                continue
            value = reg.value_in(row[3], child)
            if row[5] is None or row[5] > 1:
                getattr(obj, "_" + row[1]).append(value)
            else:
                setattr(obj, "_" + row[1], value)
        return obj

    def to_tree(self, element: QualifiedName) -> InstanceTree:
        reg = self._registry
        attrs, text, children = [], None, []
        for readable, wire, kind, tref, _lo, hi, ns in self._members:
            value = getattr(self, "_" + wire)
            if value is None or value == []:
                continue
            if kind == "attribute":
                attrs.append(("{%s}%s" % (ns, readable) if ns else readable, reg.scalar_out(value)))
            elif kind == "text_content":
                text = reg.scalar_out(value)
            else:
                for item in value if hi is None or hi > 1 else [value]:
                    children.append(reg.value_out(tref, item, QualifiedName(ns, readable)))
        # wildcard content has no declared position; it goes last
        children.extend(self._any)
        return InstanceTree(element, tuple(attrs), text or None, tuple(children))


class Registry:
    """Type lookup for one generated module."""

    def __init__(self, namespace_dict: dict, namespace: str, roots):
        self.classes = {}
        self.enums = {}
        for value in list(namespace_dict.values()):
            if isinstance(value, type) and issubclass(value, BoundObject) and value is not BoundObject:
                value._registry = self
                self.classes[value._type_name] = value
            elif isinstance(value, type) and issubclass(value, BoundEnum) and value is not BoundEnum:
                self.enums[value._type_name] = value
        self.namespace = namespace
        self.roots = {local: (QualifiedName(ns, local), tref) for ns, local, tref in roots}

    def scalar_in(self, tref, value):
        cls = self.enums.get(tref)
        return cls.from_readable(value) if cls is not None else value

    @staticmethod
    def scalar_out(value) -> str:
        return value.readable if isinstance(value, BoundEnum) else str(value)

    def value_in(self, tref, tree: InstanceTree):
        cls = self.classes.get(tref)
        if cls is not None:
            return cls.from_tree(tree)
        return self.scalar_in(tref, tree.text or "")

    def value_out(self, tref, value, element: QualifiedName) -> InstanceTree:
        if isinstance(value, BoundObject):
            return value.to_tree(element)
        text = self.scalar_out(value)
        return InstanceTree(element, text=text or None)

    def load(self, tree: InstanceTree):
        """Bind a whole message; returns ``(root_name, object)``."""
        qname, tref = self.roots[tree.element.local]
        if qname != tree.element:
            raise ValueError(f"root {tree.element} not declared")
        return tree.element.local, self.value_in(tref, tree)

    def dump(self, root_name: str, value) -> InstanceTree:
        qname, tref = self.roots[root_name]
        return self.value_out(tref, value, qname)
