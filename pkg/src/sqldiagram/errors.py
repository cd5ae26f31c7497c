"""Exception hierarchy shared by every stage of the pipeline."""

from __future__ import annotations


class SqlDiagramError(Exception):
    """Base class for all errors raised by this package."""


class SqlSyntaxError(SqlDiagramError):
    """Input text does not match the supported SQL fragment."""

    def __init__(self, message: str, line: int, column: int, expected: str | None = None):
        self.line = line
        self.column = column
        self.expected = expected
        detail = f"{message} at line {line}:{column}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class UnsupportedFeatureError(SqlDiagramError):
    """Syntactically recognisable SQL that the fragment deliberately excludes."""

    def __init__(self, feature: str, line: int, column: int):
        self.feature = feature
        self.line = line
        self.column = column
        super().__init__(f"unsupported feature {feature} at line {line}:{column}")


class UnknownAliasError(SqlDiagramError):
    """A column reference names an alias that is not in its scope chain."""

    def __init__(self, alias: str, attribute: str, line: int = 0, column: int = 0):
        self.alias = alias
        self.attribute = attribute
        self.line = line
        self.column = column
        at = f" at line {line}:{column}" if line else ""
        super().__init__(f"unknown table alias {alias!r} in {alias}.{attribute}{at}")


class AmbiguousColumnError(SqlDiagramError):
    """An unqualified column could belong to more than one in-scope table."""


class MalformedSubqueryError(SqlDiagramError):
    """An IN/ANY/ALL subquery whose select list is not exactly one column."""


class DegenerateQueryError(SqlDiagramError):
    """The query failed non-degeneracy validation; carries the full report."""

    def __init__(self, report):
        self.report = report
        super().__init__("query failed validation: " + "; ".join(str(v) for v in report.violations))


class InvalidDiagramError(SqlDiagramError):
    """A diagram graph admits no consistent depth assignment."""

    def __init__(self, message: str, stage: str | None = None):
        self.stage = stage
        super().__init__(f"{stage}: {message}" if stage else message)
