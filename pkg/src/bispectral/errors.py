"""Exception types raised by the pipeline.

Every error carries a short machine-readable ``code`` so the CLI can emit
structured diagnostics.
"""


class BispectralError(Exception):
    code = "error"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details

    def to_dict(self) -> dict:
        out = {"error": self.code, "message": str(self)}
        if self.details:
            out["details"] = {k: str(v) for k, v in self.details.items()}
        return out


class NotZNHomogeneous(BispectralError):
    code = "NotZNHomogeneous"


class RecursionSingular(BispectralError):
    code = "RecursionSingular"


class DependentKernel(BispectralError):
    code = "DependentKernel"


class RationalizationFailure(BispectralError):
    code = "RationalizationFailure"


class NonzeroRemainder(BispectralError):
    code = "NonzeroRemainder"


class DegenerateGamma(BispectralError):
    code = "DegenerateGamma"


class NotFound(BispectralError):
    code = "NotFound"


class IdentityFailed(BispectralError):
    code = "IdentityFailed"


class MarginExhausted(BispectralError):
    code = "MarginExhausted"


class InvalidParameter(BispectralError):
    code = "InvalidParameter"
