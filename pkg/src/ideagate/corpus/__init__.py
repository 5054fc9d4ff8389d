from ideagate.corpus.index import CorpusIndex, IngestReport, RetrievalHit, embed_document
from ideagate.corpus.records import PaperRecord, read_corpus_file, write_corpus_file

__all__ = [
    "CorpusIndex",
    "IngestReport",
    "RetrievalHit",
    "embed_document",
    "PaperRecord",
    "read_corpus_file",
    "write_corpus_file",
]
