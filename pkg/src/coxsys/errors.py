"""Exception type shared by all modules.

Every failure carries a short machine-readable ``code`` (for example
``MALFORMED_MATRIX`` or ``CAP_EXCEEDED``) so that callers and the CLI can
branch on it without parsing messages.
"""


class CoxsysError(Exception):
    def __init__(self, code, message="", **detail):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {message}" if message else code)


class VerificationError(CoxsysError):
    """A mathematical check failed (bound violated, relation broken, ...)."""
