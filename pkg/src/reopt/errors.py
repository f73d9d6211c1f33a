"""Exception types shared across the engine."""

from __future__ import annotations


class ReoptError(Exception):
    """Base class for all engine errors."""


# -- model construction / serialization -------------------------------------

class DuplicateName(ReoptError):
    """A name is already registered in the shared namespace."""


class MalformedKeys(ReoptError):
    """Keyed parameter values with heterogeneous key arity."""


class UnresolvedReference(ReoptError):
    """A variable/parameter reference does not resolve at instantiation."""


class UnregisteredSemanticKind(ReoptError):
    """A semantic constraint kind has no registered expander."""


class ParseError(ReoptError):
    """Malformed state/scenario document.

    ``location`` names the offending field or path.
    """

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{message} (at {location})" if location else message)
        self.location = location


# -- planner output / patch handling -----------------------------------------

class MalformedDocument(ReoptError):
    """Planner output contains no parsable JSON object."""


class MissingKey(ReoptError):
    """Planner output lacks a required key."""

    def __init__(self, key: str):
        super().__init__(f"missing required key: {key}")
        self.key = key


class UnknownOp(ReoptError):
    """Patch operation name outside the supported vocabulary."""

    def __init__(self, op: str):
        super().__init__(f"unknown patch op: {op}")
        self.op = op


class UnmappableLabel(ReoptError):
    """An entity label resolves to no canonical id."""


class ApplyError(ReoptError):
    """A patch failed validation or application.

    ``patch_index`` is the position of the failing patch inside its
    action set (or -1 for a standalone patch); ``violations`` carries the
    structured validation findings when available.
    """

    def __init__(self, message: str, patch_index: int = -1, violations=()):
        super().__init__(message)
        self.patch_index = patch_index
        self.violations = list(violations)


class PatternMatchesNothing(ApplyError):
    """A pattern op selected zero variables/rows."""


# -- solver -------------------------------------------------------------------

class NumericalFailure(ReoptError):
    """The LP kernel reported a numerical breakdown."""


class BackendUnavailable(ReoptError):
    """No solver backend registered under the requested name."""


# -- toolbox ------------------------------------------------------------------

class UnknownPreset(ReoptError):
    """No preset file found for the requested name."""


class MissingPriorValue(ReoptError):
    """fix_and_release needs a prior value for an unaffected variable."""


class InfeasibleInput(ReoptError):
    """Heuristic input cannot admit a total assignment."""


# -- gateway ------------------------------------------------------------------

class PlannerFailure(ReoptError):
    """Planner invocation or output parsing failed; wraps the cause."""


class TransportError(ReoptError):
    """The chat endpoint was unreachable after retries."""


class GatewayTimeout(ReoptError):
    """The chat endpoint did not answer within the configured timeout."""


class AuthError(ReoptError):
    """Missing or rejected credential; raised before any network call."""


class NoObjectFound(ReoptError):
    """No balanced JSON object found in the response text."""


class MockScriptError(ReoptError):
    """The scripted mock has no entry matching the request."""


# -- service ------------------------------------------------------------------

class StoreCorruption(ReoptError):
    """A persisted event record failed its checksum."""


class UnknownScenario(ReoptError):
    """No scenario with the given name or path."""
