"""Python bindings for the ricmatch simulation core."""

try:
    from . import _ricmatch as _core
except ImportError:  # extension built out-of-tree (plain CMake build)
    import _ricmatch as _core

__all__ = []
for _name in dir(_core):
    if not _name.startswith("_"):
        globals()[_name] = getattr(_core, _name)
        __all__.append(_name)
del _core, _name
