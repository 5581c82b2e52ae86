class GAFusionError(Exception):
    pass


# Bad arguments or model combinations. The CLI exits with code 2.
class ValidationFailure(GAFusionError):
    pass


class InvalidInputError(ValidationFailure):
    pass


class SpecValidationError(ValidationFailure):
    pass


class PaletteError(ValidationFailure):
    pass


class TextureSelectionError(ValidationFailure):
    pass


class UndefinedStrengthError(ValidationFailure):
    pass


class DegenerateReferenceError(ValidationFailure):
    pass


class CyclicTopologyError(ValidationFailure):
    pass


class ProblemTooLargeError(ValidationFailure):
    pass


# Unreadable files. The CLI exits with code 1.
class FormatError(GAFusionError):
    def __init__(self, message: str, line: int = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InstanceFormatError(FormatError):
    pass


class ManifestError(FormatError):
    pass
