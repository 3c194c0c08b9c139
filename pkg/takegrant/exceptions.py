class TakeGrantError(Exception):
    pass


class GraphFormatError(TakeGrantError):
    """Syntax error in a graph document. Line and column are 1-based."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = "line {}, column {}: {}".format(line, column or 1, message)
        super(GraphFormatError, self).__init__(message)


class GraphValidationError(TakeGrantError):
    pass


class UnknownVertexError(TakeGrantError, KeyError):

    def __init__(self, vertex):
        self.vertex = vertex
        super(UnknownVertexError, self).__init__("Unknown vertex '{}'.".format(vertex))

    def __str__(self):
        return self.args[0]


class VertexKindError(TakeGrantError):
    pass


class IslandError(TakeGrantError):
    pass


class RuleError(TakeGrantError):
    """A rule was applied where one or more of its conditions do not hold."""

    def __init__(self, rule, reasons):
        self.rule = rule
        self.reasons = list(reasons)
        super(RuleError, self).__init__("Rule {} is not applicable: {}.".format(rule, "; ".join(self.reasons)))


class WitnessError(TakeGrantError):
    pass
