"""Pick the stencil CG kernel: the compiled extension if it was built, else numpy."""

try:
    from ._cg_kernel import KERNEL, apply_stencil, cg_stencil
except ImportError:  # extension not built
    from ._cg_python import KERNEL, apply_stencil, cg_stencil

__all__ = ["KERNEL", "apply_stencil", "cg_stencil"]
