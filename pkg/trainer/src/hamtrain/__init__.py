"""Training harness for hamflow datasets.

Consumes a generated dataset through its on-disk interface only
(meta.json, manifest.jsonl, vocab.json, SYMF tensors) plus the `hamflow`
CLI for cross-component checks; it never imports the generator package.
"""

__version__ = "0.1.0"
