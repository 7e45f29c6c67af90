"""Exception hierarchy.

``InputError`` subclasses describe malformed or unsupported input documents;
``ClassError`` subclasses signal a polynomial outside the class the engine can
handle. The CLI maps the two families to different exit codes.
"""


class IgusaError(Exception):
    pass


class InputError(IgusaError):
    pass


class ClassError(IgusaError):
    pass


class InputSyntaxError(InputError):
    pass


class SchemaError(InputError):
    pass


class NonCoprimeWeight(InputError):
    pass


class EmptyInput(InputError):
    pass


class IrrationalRoot(ClassError):
    pass


class NonUnitDenominator(ClassError):
    pass


class SingularReduction(ClassError):
    pass


class DegenerateFace(ClassError):
    pass


class NonMonomialFace(ClassError):
    pass


class ArithmeticallyDegenerate(ClassError):
    pass


class UnsupportedClass(ClassError):
    pass


class DivergentFactor(IgusaError):
    pass


class NonPositiveGrowth(IgusaError):
    pass


class NonIntegralPrediction(IgusaError):
    pass
