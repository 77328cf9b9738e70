"""Estimator plumbing: parameter introspection and fit-state errors.

The estimator classes in this package follow the scikit-learn convention
(keyword-only constructor params stored verbatim, ``get_params`` /
``set_params``) without depending on scikit-learn itself; anything that
duck-types these two methods composes with ``sklearn.base.clone`` and
friends.
"""
from __future__ import annotations

import inspect


class NotFittedError(RuntimeError):
    """Raised when predict/transform is called before fit."""


class ParamsMixin:
    """get_params/set_params over the constructor signature, sklearn style."""

    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return sorted(
            name for name, p in sig.parameters.items()
            if name != "self" and p.kind not in (p.VAR_POSITIONAL, p.VAR_KEYWORD)
        )

    def get_params(self, deep=True):
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(
                    f"invalid parameter {name!r} for {type(self).__name__}; "
                    f"valid parameters are {sorted(valid)}"
                )
            setattr(self, name, value)
        return self

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"
