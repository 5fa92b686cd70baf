"""tensorcon base module - Object base class for declarations."""

from __future__ import annotations

from forwardpy import Object as _ForwardpyObject


class Object(_ForwardpyObject):
    """tensorcon unified base class.

    Every service declaration (expression engine, tensor engine, surface
    forms, PDE solver, commands) inherits from this. Methods declared with
    a ``...`` body are stubs; their implementations are registered from the
    ``builtins/*.impl.py`` files with ``@tensorcon.impl``.
    """

    pass
