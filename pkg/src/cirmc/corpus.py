"""Sparse count-vector corpus shared by the topic model and the mixture.

One item per line: ``item_id<TAB>word:count word:count ...`` with words as
zero-based integers in ASCII decimal, preceded by a header line
``#vocab=V #items=L``. A "document" and a "user's count vector" are the
same structure; both models read this format.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["Corpus"]


@dataclass
class Corpus:
    """List of (words, counts) int-array pairs over a fixed vocabulary."""

    docs: list
    vocab_size: int

    def __post_init__(self) -> None:
        if self.vocab_size < 1:
            raise ValueError("vocab_size must be positive")
        cleaned = []
        for words, counts in self.docs:
            words = np.asarray(words, dtype=np.int64)
            counts = np.asarray(counts, dtype=np.int64)
            if words.shape != counts.shape or words.ndim != 1:
                raise ValueError("each doc must be a pair of equal-length vectors")
            if np.any(counts < 0):
                raise ValueError("counts must be nonnegative")
            if words.size and (np.any(words < 0) or np.any(words >= self.vocab_size)):
                raise ValueError("word index out of vocabulary range")
            if np.unique(words).size != words.size:
                raise ValueError("duplicate word in doc entry")
            cleaned.append((words, counts))
        self.docs = cleaned

    def __len__(self) -> int:
        return len(self.docs)

    @property
    def total_tokens(self) -> int:
        return int(sum(int(np.sum(c)) for _, c in self.docs))

    def dense(self) -> np.ndarray:
        """(L, V) dense count matrix."""
        out = np.zeros((len(self.docs), self.vocab_size), dtype=np.int64)
        for i, (words, counts) in enumerate(self.docs):
            out[i, words] = counts
        return out

    def subset(self, indices) -> "Corpus":
        return Corpus(docs=[self.docs[int(i)] for i in indices], vocab_size=self.vocab_size)

    def write(self, path) -> None:
        lines = [f"#vocab={self.vocab_size} #items={len(self.docs)}"]
        for i, (words, counts) in enumerate(self.docs):
            pairs = " ".join(f"{int(w)}:{int(c)}" for w, c in zip(words, counts))
            lines.append(f"{i}\t{pairs}" if pairs else f"{i}\t")
        Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")

    @classmethod
    def read(cls, path) -> "Corpus":
        text = Path(path).read_text(encoding="ascii")
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("#vocab="):
            raise ValueError(f"{path}: missing '#vocab=V #items=L' header")
        header = lines[0].split()
        try:
            vocab = int(header[0].removeprefix("#vocab="))
            items = int(header[1].removeprefix("#items="))
        except (IndexError, ValueError) as exc:
            raise ValueError(f"{path}: malformed header {lines[0]!r}") from exc
        docs = []
        for ln in lines[1:]:
            _, _, rest = ln.partition("\t")
            pairs = rest.split()
            words = np.array([int(p.split(":")[0]) for p in pairs], dtype=np.int64)
            counts = np.array([int(p.split(":")[1]) for p in pairs], dtype=np.int64)
            docs.append((words, counts))
        if len(docs) != items:
            raise ValueError(f"{path}: header says {items} items, found {len(docs)}")
        return cls(docs=docs, vocab_size=vocab)
