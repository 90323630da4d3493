# ====================================================
# Exceptions for signms
# ----------------------------------------------------
# - One base class so the runner can catch per row
# - Config / ingestion / generation problems
# - Numerical failures carry the diagnostic they hit
# ====================================================


class SignmsError(Exception):
    pass


class ConfigurationError(SignmsError):
    pass


class IngestionError(SignmsError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(f"{where}{message}")


class GenerationError(SignmsError):
    pass


class DomainError(SignmsError):
    pass


class SolverError(SignmsError):
    def __init__(self, message, diagnostic=None):
        self.diagnostic = diagnostic
        if diagnostic:
            message = f"{message} ({diagnostic})"
        super().__init__(message)


class EigenSolverError(SignmsError):
    def __init__(self, element, message):
        self.element = element
        super().__init__(f"element {element}: {message}")


class BasisConstructionError(SignmsError):
    # failures: list of (i, j, m, message)
    def __init__(self, failures):
        self.failures = list(failures)
        lines = [f"  (i={i}, j={j}, m={m}): {msg}" for i, j, m, msg in self.failures]
        super().__init__(
            f"{len(self.failures)} basis column(s) failed:\n" + "\n".join(lines)
        )
