"""WAND exceptions."""

# Copyright (C) 2026 The WAND developers
#
# Licensed under the MIT license; see COPYING for the full text.

__all__ = ('WandException', 'DatasetValidationException',
           'MissingSkillException', 'InvalidSkillException',
           'InvalidLatentException',
           'ConfigurationException', 'EmptyTraceException',
           'UnsatisfiableConditionException', 'EnumerationCapException',
           'TraceFormatException', 'DimensionMismatchException',
           'InvariantViolationException')


class WandException(Exception):

    include_traceback = False
    """If True, front ends should show the traceback along with the
    message.

    Leave this False on subclasses that represent an expected failure
    condition (a malformed input file, an unsatisfiable request) and set
    it to True on subclasses that represent a programming error."""

    def __init__(self, *args, **kwargs):
        self._ranker = kwargs.pop('ranker', None)
        if kwargs:
            raise TypeError('WandException does not take keyword arguments: %s'
                            % ', '.join(kwargs.keys()))
        Exception.__init__(self, *args)

    def __str__(self):
        s = Exception.__str__(self)
        if self._ranker is not None:
            return 'ranker %d: %s' % (self._ranker, s)
        return s

    def get_ranker(self):
        """Return the index of the ranker the error refers to, or None."""
        return self._ranker


class DatasetValidationException(WandException):

    def __init__(self, msg='', ranker=None):
        WandException.__init__(self, "Invalid dataset: %s" % msg,
                               ranker=ranker)
        self.detail = msg


class MissingSkillException(WandException):

    include_traceback = True

    def __init__(self, entity):
        WandException.__init__(self, "No skill for considered entity %d"
                               % entity)
        self.entity = entity


class InvalidSkillException(WandException):

    include_traceback = True

    def __init__(self, msg=''):
        WandException.__init__(self, "Invalid skills: %s" % msg)


class InvalidLatentException(WandException):

    include_traceback = True

    def __init__(self, msg=''):
        WandException.__init__(self, "Invalid latent variables: %s" % msg)


class ConfigurationException(WandException):

    def __init__(self, msg=''):
        WandException.__init__(self, "Invalid configuration: %s" % msg)


class EmptyTraceException(WandException):

    def __init__(self, what='summary'):
        WandException.__init__(self, "Cannot compute %s of an empty trace"
                               % what)


class UnsatisfiableConditionException(WandException):

    def __init__(self, msg=''):
        WandException.__init__(self, "Conditioning cannot be satisfied: %s"
                               % msg)


class EnumerationCapException(WandException):

    def __init__(self, count, cap, ranker=None):
        WandException.__init__(self, "%d orderings exceed the enumeration "
                               "cap of %d; use the truncated or approximate "
                               "predictive instead" % (count, cap),
                               ranker=ranker)
        self.count = count
        self.cap = cap


class TraceFormatException(WandException):

    def __init__(self, msg=''):
        WandException.__init__(self, "Bad trace: %s" % msg)


class DimensionMismatchException(WandException):

    def __init__(self, msg=''):
        WandException.__init__(self, "Dimension mismatch: %s" % msg)


class InvariantViolationException(WandException):

    include_traceback = True

    def __init__(self, msg=''):
        WandException.__init__(self, "Invariant violated: %s" % msg)
