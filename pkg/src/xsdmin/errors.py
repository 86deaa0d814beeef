"""Exception hierarchy shared by every xsdmin module."""


class XsdMinError(Exception):
    """Base class for all errors raised by xsdmin."""


class MalformedXml(XsdMinError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedConstruct(XsdMinError):
    def __init__(self, construct, line=None, location=""):
        self.construct = construct
        self.line = line
        where = f"{location}:{line}" if location else f"line {line}"
        super().__init__(f"unsupported XSD construct '{construct}' at {where}")


class DuplicateName(XsdMinError):
    pass


class CircularReference(XsdMinError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("circular schema reference: " + " -> ".join(self.cycle))


class LoadFailure(XsdMinError):
    def __init__(self, location, cause):
        self.location = location
        self.cause = cause
        super().__init__(f"cannot load schema '{location}': {cause}")


class NamespaceMismatch(XsdMinError):
    pass


class InternalCollision(XsdMinError):
    """Two components in one naming scope received the same short name."""


class DicSyntaxError(XsdMinError):
    def __init__(self, line_no, message):
        self.line_no = line_no
        super().__init__(f"dictionary line {line_no}: {message}")


class ChecksumMismatch(XsdMinError):
    pass


class TemplateError(XsdMinError):
    def __init__(self, template, message):
        self.template = template
        super().__init__(f"template '{template}': {message}")


class SchemaViolation(XsdMinError):
    def __init__(self, path, message, expected=()):
        self.path = path
        self.expected = tuple(expected)
        text = f"{path}: {message}"
        if self.expected:
            text += " (expected one of: " + ", ".join(self.expected) + ")"
        super().__init__(text)


class MixedContent(SchemaViolation):
    def __init__(self, path):
        super().__init__(path, "mixed text and element content is not supported")


class EncodeError(XsdMinError):
    pass


class JsonSyntax(XsdMinError):
    pass


class UnknownMember(XsdMinError):
    def __init__(self, key, type_name):
        self.key = key
        self.type_name = type_name
        super().__init__(f"unknown member '{key}' in type '{type_name}'")


class UnknownWireMember(UnknownMember):
    pass


class EnumOutOfRange(XsdMinError):
    pass


class CorruptStream(XsdMinError):
    pass


class ConnectionFailure(XsdMinError):
    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)
