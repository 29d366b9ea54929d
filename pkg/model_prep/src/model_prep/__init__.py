"""Training and export scripts for the thumbnail event classifier.

The consumer (the ltcgif client package) only sees the exported artifacts:
a TFLite flatbuffer, a label sidecar (one name per line, order = output
index), and a reference-predictions JSONL used to cross-check backends.
"""

from .export import ExportArtifacts, export, verify_export
from .train import TrainConfig, train

__all__ = ["TrainConfig", "train", "ExportArtifacts", "export", "verify_export"]
