"""Hermite-spectral scattering operator for the 1d nonlinear Schrodinger equation."""

try:
    from ._lenscatter import *  # noqa: F401,F403  packaged wheel layout
    from ._lenscatter import __version__  # noqa: F401
except ImportError:  # in-tree build: the extension sits on sys.path directly
    from _lenscatter import *  # noqa: F401,F403
    from _lenscatter import __version__  # noqa: F401
