"""clipseek: content-based video retrieval over frame sequences.

Pipeline: decode frames -> select keyframes -> extract color/texture/edge/
region features -> bucket by the histogram range-finder tree -> serve
ranked clip queries (Euclidean distance over combined feature vectors) and
sketch queries (trajectory gradient correlation), with a precision/recall
evaluation harness.
"""

__version__ = "0.1.0"
