"""Exception hierarchy shared by all ggk modules."""

from __future__ import annotations

from typing import Any


class GGKError(Exception):
    """Base class; ``witness`` carries machine-readable data about the failure."""

    code = "GGKError"

    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness

    def to_dict(self) -> dict:
        return {"error": self.code, "message": str(self), "witness": self.witness}


def _make(name: str, base: type = GGKError) -> type:
    return type(name, (base,), {"code": name})


# finite_core
NotAssociative = _make("NotAssociative")
NoIdentity = _make("NoIdentity")
NoInverse = _make("NoInverse")
OrderBoundExceeded = _make("OrderBoundExceeded")
NotNormal = _make("NotNormal")
NotAutomorphism = _make("NotAutomorphism")
NotHomomorphism = _make("NotHomomorphism")

# vcgroup
ElementOutOfRange = _make("ElementOutOfRange")
NotZorDinfty = _make("NotZorDinfty")
RelationViolated = _make("RelationViolated")
PreimageNotFinite = _make("PreimageNotFinite")
NotWellDefined = _make("NotWellDefined")
InvalidVCGroup = _make("InvalidVCGroup")

# gog
Disconnected = _make("Disconnected")
EdgeGroupNotFinite = _make("EdgeGroupNotFinite")
ValidationError = _make("ValidationError")

# pi1
TokenTypeMismatch = _make("TokenTypeMismatch")
EdgeCosetEnumerationCapExceeded = _make("EdgeCosetEnumerationCapExceeded")
ProjectionMismatch = _make("ProjectionMismatch")

# tree
EnumerationCapExceeded = _make("EnumerationCapExceeded")
UndecidableMembership = _make("UndecidableMembership")

# constructions
VertexNotZorDinfty = _make("VertexNotZorDinfty")
EdgeGroupFinite = _make("EdgeGroupFinite")
InducedMapNotInjective = _make("InducedMapNotInjective")
ClaimViolated = _make("ClaimViolated")
GroupFinite = _make("GroupFinite")
NotVirtuallyCyclicVertex = _make("NotVirtuallyCyclicVertex")

# certificates
CertificateError = _make("CertificateError")
RuleShapeMismatch = _make("RuleShapeMismatch", CertificateError)
SideConditionFailed = _make("SideConditionFailed", CertificateError)
CycleDetected = _make("CycleDetected", CertificateError)
TamperedNode = _make("TamperedNode", CertificateError)

# cli
SchemaError = _make("SchemaError")
WordSyntaxError = _make("WordSyntaxError")
