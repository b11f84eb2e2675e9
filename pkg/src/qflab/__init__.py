"""Privacy laboratory for federated learning with expressive variational
quantum circuit models: simulator, tower encoding, shift-rule gradients,
federated orchestration, gradient-inversion attacks, and landscape analysis."""

__version__ = "0.1.0"
