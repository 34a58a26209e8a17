"""On-line handwritten mathematical symbol recognition toolkit.

Subpackages by concern:

* :mod:`symrec.recording` - data model and the JSON wire format
* :mod:`symrec.preprocess` - cleaning/normalization steps and queues
* :mod:`symrec.augment` - training-set expansion
* :mod:`symrec.features` - feature catalog and standardization
* :mod:`symrec.gtw` - greedy time warping classifier
* :mod:`symrec.mlp` - from-scratch multilayer perceptron
* :mod:`symrec.evaluate` - TOP-n and merged error measures
* :mod:`symrec.pipeline` - configs, experiments, classifier bundles
* :mod:`symrec.service` - HTTP classification endpoint
"""

from .recording import (
    Point,
    Recording,
    Stroke,
    SymbolTable,
    bounding_box,
    parse_recording,
    serialize_recording,
)

__version__ = "0.1.0"

__all__ = [
    "Point",
    "Stroke",
    "Recording",
    "SymbolTable",
    "parse_recording",
    "serialize_recording",
    "bounding_box",
    "__version__",
]
