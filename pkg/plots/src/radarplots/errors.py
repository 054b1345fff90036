class PlotError(Exception):
    """Base class for chart rendering failures."""


class SchemaMismatch(PlotError):
    """CSV header or cell does not match the documented schema; the
    message names the offending column."""


class EmptyCsv(PlotError):
    """CSV parsed but holds no data rows; rendering would produce an
    empty image, so fail instead."""
