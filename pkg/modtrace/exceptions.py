
class ModtraceError(Exception):
    pass


class DivisionByZero(ModtraceError, ZeroDivisionError):
    pass


class QuantumDenominatorZero(ModtraceError):
    pass


class InvalidOrder(ModtraceError, ValueError):
    pass


class UnsupportedType(ModtraceError, ValueError):
    pass


class DimensionMismatch(ModtraceError, ValueError):
    pass


class SingularWeight(ModtraceError):
    pass


class EvenOrderUnsupported(ModtraceError):
    pass


class ParamsMismatch(ModtraceError, ValueError):
    pass


class NonScalarCentralAction(ModtraceError):
    pass


class DomainMismatch(ModtraceError, ValueError):
    pass


class ShapeMismatch(ModtraceError, ValueError):
    pass


class NotAnIntertwiner(ModtraceError):
    pass


class NotSemisimple(ModtraceError):
    pass


class NotScalar(ModtraceError):
    pass


class NonGenericParameter(ModtraceError):
    pass


class TangleSyntaxError(ModtraceError):
    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = f'line {line}, col {col}: {message}'
        super().__init__(message)


class TypeMismatch(ModtraceError):
    def __init__(self, message, slice_index=None, position=None):
        self.slice_index = slice_index
        self.position = position
        if slice_index is not None:
            message = f'slice {slice_index}, position {position}: {message}'
        super().__init__(message)


class UnboundCoupon(ModtraceError):
    pass


class OrientationUnsupported(ModtraceError):
    pass


class MoveNotApplicable(ModtraceError):
    pass


class SamplingExhausted(ModtraceError):
    pass
