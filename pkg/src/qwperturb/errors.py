"""Exception hierarchy. Every library error derives from ``QWPerturbError``."""


class QWPerturbError(ValueError):
    pass


class NotSquare(QWPerturbError):
    pass


class RowSumViolation(QWPerturbError):
    def __init__(self, row, total):
        self.row = row
        self.total = total
        super().__init__(f"row {row} sums to {total!r}, expected 1")


class NegativeEntry(QWPerturbError):
    def __init__(self, row, col, value):
        self.row = row
        self.col = col
        self.value = value
        super().__init__(f"entry ({row}, {col}) is negative: {value!r}")


class NotErgodic(QWPerturbError):
    pass


class NotSymmetric(QWPerturbError):
    pass


class DimensionMismatch(QWPerturbError):
    pass


class InfeasibleTruncation(QWPerturbError):
    pass


class CannotPreserveStochasticity(QWPerturbError):
    pass


class DimensionLimit(QWPerturbError):
    pass


class EmptyMarkedSet(QWPerturbError):
    pass


class AllMarked(QWPerturbError):
    pass


class EmptyComplement(QWPerturbError):
    pass


class SaturatedLeak(QWPerturbError):
    pass


class GapDominatedByNoise(QWPerturbError):
    pass


class ErgodicCoefficientOne(QWPerturbError):
    pass


class OverlapTooSmall(QWPerturbError):
    pass


class MatrixFormatError(QWPerturbError):
    pass
