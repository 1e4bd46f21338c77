"""Exception types. Each carries a short ``hypothesis`` string naming what failed."""


class CongruaError(Exception):
    hypothesis = "unspecified"

    def __init__(self, message: str = "", hypothesis: str | None = None):
        super().__init__(message or self.__class__.__name__)
        if hypothesis is not None:
            self.hypothesis = hypothesis

    @property
    def kind(self) -> str:
        return self.__class__.__name__

    def to_json(self) -> dict:
        return {"error": self.kind, "hypothesis": self.hypothesis, "message": str(self)}


class NotFinite(CongruaError, ValueError):
    hypothesis = "module must be finite (no free part after localization)"


class NoIdempotent(CongruaError):
    hypothesis = "the character must split off a factor of the algebra over K"


class RankNotOne(CongruaError):
    hypothesis = "the lambda-isotypic sublattices must have rank one"


class PreconditionFailed(CongruaError):
    def __init__(self, clause: str, message: str = ""):
        super().__init__(message or clause, hypothesis=clause)
        self.clause = clause


class InvalidStructure(CongruaError, ValueError):
    hypothesis = "algebra, character or module axioms"


class Degenerate(CongruaError):
    hypothesis = "the congruence ideal must be nonzero"


class NoCICover(CongruaError):
    hypothesis = "some recombination of g relations must present a finite flat complete intersection"


class EisensteinIdeal(CongruaError):
    hypothesis = "residual eigensystem must be non-Eisenstein at p"


class BlockNotFound(CongruaError):
    hypothesis = "the eigensystem must occur in the cuspidal space"


class Unsupported(CongruaError):
    hypothesis = "Hecke eigenvalues must be rational integers"


class PairingDegenerate(CongruaError):
    hypothesis = "the twisted pairing must be perfect on the localized plus and minus lattices"


class PrecisionLoss(CongruaError):
    hypothesis = "period solve residual must be below tolerance"


class PoleHit(CongruaError):
    hypothesis = "the archimedean factor must be finite at the evaluation point"


class NotPrimitive(CongruaError):
    hypothesis = "the quadratic character must be primitive"


class SlowConvergence(CongruaError):
    hypothesis = "the coefficient budget must reach the target error"


class UnsupportedLocalType(CongruaError):
    hypothesis = "every prime dividing N must divide it exactly once"


class ConditionViolated(CongruaError):
    hypothesis = "standing coprimality conditions"


class HypothesisViolation(CongruaError):
    """Raised by input validation when a standing hypothesis fails."""
