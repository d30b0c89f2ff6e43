"""Domain errors raised across the package.

Everything the library raises on bad input derives from QuadrankError so the
CLI can map any domain failure to exit code 1 with a clean message. Usage
errors (bad flags) are argparse's business and exit with code 2.
"""

from __future__ import annotations


class QuadrankError(Exception):
    """Base class for all domain errors raised by quadrank."""


# ---------------------------------------------------------------------------
# graph construction and queries


class GraphError(QuadrankError):
    """Invalid debate graph input."""


class DuplicateId(GraphError):
    pass


class DanglingEndpoint(GraphError):
    pass


class SelfRelation(GraphError):
    pass


class DuplicateRelation(GraphError):
    pass


class WeightOutOfRange(GraphError):
    pass


class UnknownArgument(GraphError):
    pass


class CycleDetected(GraphError):
    """The relation graph is not acyclic; carries one offending cycle."""

    def __init__(self, cycle: list[int]):
        self.cycle = list(cycle)
        pretty = " -> ".join(str(a) for a in self.cycle)
        super().__init__(f"relation graph contains a cycle: {pretty}")


# ---------------------------------------------------------------------------
# scoring


class OutOfRangeInput(QuadrankError):
    """A base weight or score fell outside the unit interval."""


# ---------------------------------------------------------------------------
# corpus ingestion


class IngestError(QuadrankError):
    pass


class MalformedXml(IngestError):
    pass


class MalformedGraphFile(IngestError):
    pass


class UnknownEntailmentValue(IngestError):
    pass


class ConflictingArgumentText(IngestError):
    pass


class UnknownGraphName(IngestError):
    pass


class DuplicateExemplar(IngestError):
    pass


# ---------------------------------------------------------------------------
# ordering and dialogue

class NotAPermutation(QuadrankError):
    """An ordering is not a permutation of the expected argument ids."""


# ---------------------------------------------------------------------------
# metrics


class MetricsError(QuadrankError):
    pass


class MismatchedArgumentSets(MetricsError):
    pass


class AllUndefined(MetricsError):
    """Every record was an undefined marker; nothing to average."""


class OutputExists(QuadrankError):
    """Refusing to overwrite an existing output without --force."""


# ---------------------------------------------------------------------------
# harness: prompt building


class HarnessError(QuadrankError):
    pass


class ExemplarCountMismatch(HarnessError):
    pass


class UnresolvedPlaceholder(HarnessError):
    pass


# harness: backends


class BackendError(HarnessError):
    pass


class TransportError(BackendError):
    pass


class RateLimited(BackendError):
    pass


class AuthMissing(BackendError):
    pass


class TimeoutExceeded(BackendError):
    pass


# harness: response parsing


class FormatError(HarnessError):
    """Model output lacks the structure the strategy asked for."""


class MissingRanking(FormatError):
    pass


class UnknownArgumentId(FormatError):
    pass


class MissingAdjacency(FormatError):
    pass


class EmptyAfterRejection(FormatError):
    """An adjacency structure was present but every edge was rejected."""


#: everything the runner counts as a format violation (NotAPermutation is
#: shared with dialogue flattening, hence not a FormatError subclass).
PARSE_FAILURES = (FormatError, NotAPermutation)
