class QFridgeError(Exception):
    pass


class ParameterDomainError(QFridgeError, ValueError):
    pass


class DegeneracyError(ParameterDomainError):
    pass


class FrequencyDomainError(QFridgeError, ValueError):
    pass


class DegenerateTemperatureError(QFridgeError, ArithmeticError):
    pass


class DensityMatrixError(QFridgeError, ValueError):
    pass


class BasisMismatchError(QFridgeError, ValueError):
    pass


class LiouvillianStructureError(QFridgeError, RuntimeError):
    pass


class DecompositionError(QFridgeError, ArithmeticError):
    def __init__(self, block: str, detail: str):
        self.block = block
        super().__init__(f"block {block}: {detail}")


class NonErgodicError(QFridgeError, ArithmeticError):
    pass


class NumericalError(QFridgeError, ArithmeticError):
    pass


class NotConvergedError(QFridgeError, RuntimeError):
    def __init__(self, final_distance: float, epsilon: float):
        self.final_distance = final_distance
        self.epsilon = epsilon
        super().__init__(
            f"distance {final_distance:.3e} never fell below {epsilon:.3e} "
            "within the simulated window"
        )


class OrderingError(QFridgeError, ValueError):
    pass


class ArityError(QFridgeError, ValueError):
    pass


class VerificationError(QFridgeError, AssertionError):
    def __init__(self, condition: str, detail: str):
        self.condition = condition
        super().__init__(f"{condition}: {detail}")


class ConfigError(QFridgeError, ValueError):
    pass
