"""Python surface of the isonorm laboratory.

Everything heavy lives in the compiled ``_isonorm`` module; this package
re-exports it. In an installed wheel the extension sits inside the package;
when working from a build tree, put the CMake build directory on PYTHONPATH
and the top-level module is picked up instead.
"""

try:
    from ._isonorm import *  # noqa: F401,F403
    from ._isonorm import __doc__ as _core_doc
except ImportError:  # build-tree layout
    from _isonorm import *  # noqa: F401,F403
    from _isonorm import __doc__ as _core_doc

__doc__ = (__doc__ or "") + "\n\n" + (_core_doc or "")
__version__ = "0.1.0"
