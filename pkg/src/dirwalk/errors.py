class DirwalkError(Exception):
    pass


class NotPrime(DirwalkError, ValueError):
    pass


class DomainError(DirwalkError, ValueError):
    pass


class BudgetExceeded(DirwalkError):
    pass


class PrincipalNotSupported(DirwalkError, ValueError):
    pass


class SpecInvalid(DirwalkError, ValueError):
    pass


class InsufficientGrid(DirwalkError, ValueError):
    pass


class PoleAt1(DirwalkError, ZeroDivisionError):
    pass


class GammaPole(DirwalkError, ZeroDivisionError):
    pass


class BranchAmbiguity(DirwalkError):
    pass
