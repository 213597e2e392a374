"""
Contains common exceptions used by ovbound
"""

class ValidationException(Exception):
    """
    Validation of some condition failed
    """

class DomainException(ValidationException):
    """
    An argument lies outside the domain of the operation
    """

class PreconditionException(Exception):
    """
    An operation was requested on input that does not satisfy its precondition
    """

class PoleException(Exception):
    """
    Evaluation landed on (or numerically at) a pole
    """

class BranchContinuationException(Exception):
    """
    Radial continuation of a branch could not keep the per-step phase change below
    the cap within the step budget, or the continued function vanished on the path
    """
    def __init__(self, message, z=None):
        super().__init__(message)
        self.z = z

class PrecisionLimitException(BranchContinuationException):
    """
    A value on the continuation path is below what double precision can resolve
    """

class OVBInternalException(Exception):
    """
    ovbound internal numerical defect
    """

class OVBUnimplementedException(Exception):
    """
    Functionality has not been implemented
    """
