"""termspace: term-level vector space models built from rule-based term extraction.

The pipeline turns raw text corpora into term embeddings: dictionary-driven
morphological segmentation, syntagma parsing with typed relations, two-step
term extraction, a deeply annotated corpus whose token of record is the term,
skip-gram / CBOW training with negative sampling, a query algebra over the
trained vectors, and semantic-map graph export.
"""

__version__ = "0.1.0"
