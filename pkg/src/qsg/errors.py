"""Exception types shared across the toolkit."""


class QSGError(Exception):
    """Base class for all toolkit errors."""


class ExtensionMixError(QSGError):
    """Two scalars with distinct quadratic extension tags were combined."""


class AmbientMismatch(QSGError):
    """Operands live over different ambient dimensions."""


class PreconditionError(QSGError):
    """A documented operation precondition was violated by the caller."""


class BudgetExhausted(QSGError):
    """A resource budget ran out; the result is 'undecided', never wrong."""


class GenericityExhausted(QSGError):
    """Random projection re-sampling hit the retry cap without a generic draw."""


class WitnessUnavailable(QSGError):
    """The decision is known but an exact witness would need a field extension
    beyond one quadratic extension of Q."""


class PaperAssertionFailure(QSGError):
    """A runtime-checked proof step failed on a concrete instance.

    Carries a structured report so the instance is reproducible; this is a
    first-class output of the pipeline, not an internal crash.
    """

    def __init__(self, claim, report=None):
        self.claim = claim
        self.report = dict(report or {})
        super().__init__(f"paper-assertion-failure: {claim}")

    def to_json(self):
        return {"kind": "paper-assertion-failure", "claim": self.claim,
                "report": self.report}


class InternalAuthorityError(QSGError):
    """A fast path disagreed with the authoritative oracle (must never happen)."""
