"""Exception hierarchy shared by all levigauge modules."""


class LeviGaugeError(Exception):
    """Base class; the CLI maps these to exit code 2."""


class PolynomialSyntaxError(LeviGaugeError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownVariable(LeviGaugeError):
    pass


class ExponentOverflow(LeviGaugeError):
    pass


class SchemaError(LeviGaugeError):
    pass


class NotTriangular(LeviGaugeError):
    def __init__(self, j, variable):
        super().__init__(f"f_{j} depends on z{variable}, which comes after z{j}")
        self.j = j
        self.variable = variable


class NoPurePower(LeviGaugeError):
    def __init__(self, j):
        super().__init__(f"f_{j}(0,...,0,z{j}) vanishes identically")
        self.j = j


class NonzeroConstantTerm(LeviGaugeError):
    def __init__(self, j):
        super().__init__(f"f_{j}(0) != 0")
        self.j = j


class ModeHypothesisViolated(LeviGaugeError):
    def __init__(self, mode, j):
        super().__init__(
            f"mode {mode} requires k_j = 0, but f_{j} carries a z{j}-power "
            f"of degree below m_{j} in its remainder"
        )
        self.mode = mode
        self.j = j


class NonPositiveLogArgument(LeviGaugeError):
    pass


class EmptySample(LeviGaugeError):
    pass


class NonFiniteHessian(LeviGaugeError):
    def __init__(self, point):
        super().__init__(f"non-finite Levi form at {point}")
        self.point = point


class NonPositiveEigen(LeviGaugeError):
    def __init__(self, delta, value, point):
        super().__init__(f"min Levi eigenvalue {value:.6g} <= 0 at delta={delta:g}")
        self.delta = delta
        self.value = value
        self.point = point


class TooFewDeltas(LeviGaugeError):
    pass


class CurveError(LeviGaugeError):
    pass
