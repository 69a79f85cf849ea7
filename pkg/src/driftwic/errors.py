class DriftWiCError(Exception):
    """Base class of the errors the command line turns into exit codes."""
    exit_code = 1


class ConfigError(DriftWiCError, ValueError):
    exit_code = 1


class DataError(DriftWiCError, ValueError):
    exit_code = 2


class SchemaError(DataError):
    def __init__(self, record_id: str, field: str, reason: str = "missing field"):
        super().__init__("record " + str(record_id) + ": " + reason + " '" + field + "'")
        self.record_id = record_id
        self.field = field


class TargetTruncated(DataError):
    def __init__(self, instance_id: str, which: str, max_len: int):
        super().__init__("instance " + str(instance_id) + ": target span of " + which +
                         " does not fit in max_len=" + str(max_len))
        self.instance_id = instance_id
        self.which = which


class CheckpointError(DataError):
    def __init__(self, message: str, names=()):
        if names:
            message = message + ": " + ", ".join(names)
        super().__init__(message)
        self.names = list(names)


class NumericError(DriftWiCError, ArithmeticError):
    exit_code = 3
