"""fallsynth: phase-structured 3D falling-motion synthesis.

Generates Impact/Glitch/Fall sequences conditioned on artistic attributes
with a cyclic attribute-conditioned VAE, plus the data pipeline, evaluation
metrics, CLI and HTTP generation service around it.
"""

__version__ = "0.1.0"
