from ideagate.docproc.chunking import Chunk, Tokenizer, WHITESPACE, approx_subword, chunk_document, split_to_fit
from ideagate.docproc.segment import DocumentText, segment_paragraphs
from ideagate.docproc.user_corpus import UserCorpus

__all__ = [
    "Chunk",
    "Tokenizer",
    "WHITESPACE",
    "approx_subword",
    "chunk_document",
    "split_to_fit",
    "DocumentText",
    "segment_paragraphs",
    "UserCorpus",
]
