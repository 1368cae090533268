"""hoifit: action-conditioned 3D human-object arrangement fitting."""

__version__ = "0.1.0"
