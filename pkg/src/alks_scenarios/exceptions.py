"""Exception types raised by the pipeline."""


class IngestError(ValueError):
    """A highD-format input file could not be read.

    Carries the offending file, the 1-based CSV line and the column name where
    they are known.
    """

    def __init__(self, message, path=None, row=None, column=None):
        self.path = None if path is None else str(path)
        self.row = row
        self.column = column
        where = []
        if self.path is not None:
            where.append(self.path)
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.reason = message


class TriggerError(ValueError):
    """The trigger back-calculation yields a non-positive starting gap."""


class ReplayError(RuntimeError):
    pass


class ExportError(ValueError):
    pass
