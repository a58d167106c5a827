"""
TIES - Batch Extractor
End-to-end wiring of a corpus run: tokenize → embed → smooth → Φ → TIES
features, with document-level parallelism and an order-preserving writer.
"""

import time
from collections import deque
from concurrent.futures import Future, ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Deque, Dict, Iterable, Iterator, List, Optional, Union

from dataclasses_json import dataclass_json
from tqdm import tqdm

from ties.pipelines.embedding import DocMatrix, EmbeddingLexicon, embed_document, load_lexicon
from ties.pipelines.feature_io import FeatureFormat, FeatureRow, FeatureWriter
from ties.pipelines.smoothing import WindowSpec
from ties.pipelines.textprep import LabeledDocument, TokenizerOptions, load_corpus, tokenize
from ties.topology.diagram_metric import DiagramMetric
from ties.topology.features import extract_document_features
from ties.topology.geometry import DistanceMatrix, write_matrix_csv
from ties.utils.config_loader import RunConfig
from ties.utils.errors import ConfigError, ContractViolation, DocumentError
from ties.utils.logging_config import LoggerMixin

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_SKIPPED = 2


@dataclass
class DocumentJob:
    """Work item shipped to a worker: an embedded document plus settings."""

    matrix: DocMatrix
    labels: List[str]
    window: WindowSpec
    metric: DiagramMetric
    keep_phi: bool = False


@dataclass
class DocumentOutcome:
    """Result of one document, successful or skipped."""

    doc_id: str
    row: Optional[FeatureRow] = None
    phi: Optional[DistanceMatrix] = None
    reason: Optional[str] = None
    message: str = ""
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def skipped(self) -> bool:
        return self.row is None


@dataclass_json
@dataclass
class SkipRecord:
    id: str
    reason: str
    message: str


@dataclass_json
@dataclass
class RunReport:
    """Summary of an ``extract`` run, persisted as JSON."""

    documents_seen: int = 0
    processed: int = 0
    skipped: List[SkipRecord] = field(default_factory=list)
    record_errors: List[str] = field(default_factory=list)
    stage_seconds: Dict[str, float] = field(default_factory=dict)
    elapsed_seconds: float = 0.0
    dimension: int = 0
    features_path: str = ""
    config: Dict[str, Any] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_SKIPPED if (self.skipped or self.record_errors) else EXIT_OK

    def add_time(self, stage: str, seconds: float) -> None:
        self.stage_seconds[stage] = self.stage_seconds.get(stage, 0.0) + seconds


def process_document(job: DocumentJob) -> DocumentOutcome:
    """Worker entry point: topology stages for one embedded document."""
    doc_id = job.matrix.doc_id
    timings: Dict[str, float] = {}
    try:
        features, phi = extract_document_features(job.matrix, job.window, job.metric, timings)
    except DocumentError as exc:
        return DocumentOutcome(doc_id=doc_id, reason=exc.reason, message=str(exc), timings=timings)
    except Exception as exc:  # a poison document must not abort the batch
        return DocumentOutcome(doc_id=doc_id, reason="error", message=f"{type(exc).__name__}: {exc}",
                               timings=timings)
    row = FeatureRow.from_vector(features, job.labels)
    return DocumentOutcome(doc_id=doc_id, row=row, phi=phi if job.keep_phi else None, timings=timings)


def _resolve(item: Union[Future, DocumentOutcome]) -> DocumentOutcome:
    return item.result() if isinstance(item, Future) else item


def ordered_outcomes(
    items: Iterable[Union[DocumentJob, DocumentOutcome]],
    worker: Callable[[DocumentJob], DocumentOutcome],
    workers: int,
    window: Optional[int] = None
) -> Iterator[DocumentOutcome]:
    """
    Run ``worker`` over the jobs and yield outcomes in input order.

    At most ``window`` documents are in flight; already-resolved outcomes
    (e.g. documents skipped before embedding) pass through in place.
    """
    if workers <= 1:
        for item in items:
            yield worker(item) if isinstance(item, DocumentJob) else item
        return

    window = window or workers * 4
    with ProcessPoolExecutor(max_workers=workers) as executor:
        pending: Deque[Union[Future, DocumentOutcome]] = deque()
        for item in items:
            pending.append(executor.submit(worker, item) if isinstance(item, DocumentJob) else item)
            if len(pending) >= window:
                yield _resolve(pending.popleft())
        while pending:
            yield _resolve(pending.popleft())


class BatchExtractor(LoggerMixin):
    """Runs a full feature extraction over a corpus according to a :class:`RunConfig`."""

    def __init__(self, config: RunConfig, lexicon: Optional[EmbeddingLexicon] = None):
        self.config = config
        self.window = config.window()
        self.metric = config.diagram_metric()
        self.tokenizer_options: TokenizerOptions = config.tokenizer_options()
        self.lexicon = lexicon
        self.report = RunReport()

    def _load_lexicon(self) -> EmbeddingLexicon:
        if self.lexicon is None:
            self.lexicon = load_lexicon(self.config.lexicon_path)
        if self.lexicon.dimension < 3:
            raise ConfigError(f"lexicon dimension {self.lexicon.dimension} < 3; leave-one-out needs D >= 3")
        return self.lexicon

    def _jobs(self, documents: Iterable[LabeledDocument], lexicon: EmbeddingLexicon) -> Iterator[Union[DocumentJob, DocumentOutcome]]:
        keep_phi = bool(self.config.phi_dir)
        for document in documents:
            self.report.documents_seen += 1
            clock = time.perf_counter()
            tokens = tokenize(document.text, self.tokenizer_options, source_id=document.id)
            after_tokenize = time.perf_counter()
            self.report.add_time("tokenize", after_tokenize - clock)
            try:
                matrix = embed_document(tokens, lexicon)
            except DocumentError as exc:
                yield DocumentOutcome(doc_id=document.id, reason=exc.reason, message=str(exc))
                continue
            finally:
                self.report.add_time("embed", time.perf_counter() - after_tokenize)
            yield DocumentJob(matrix=matrix, labels=sorted(document.labels), window=self.window,
                              metric=self.metric, keep_phi=keep_phi)

    def run(self) -> RunReport:
        """
        Extract features for every document and write them in input order.

        Returns:
            RunReport; ``report.exit_code`` is 2 when any document was skipped
        """
        started = time.perf_counter()
        lexicon = self._load_lexicon()
        corpus = load_corpus(self.config.corpus_path, self.config.corpus_format)
        features_path = Path(self.config.features_path)
        fmt = FeatureFormat(self.config.features_format) if self.config.features_format \
            else FeatureFormat.for_path(features_path)
        phi_dir = Path(self.config.phi_dir) if self.config.phi_dir else None
        if phi_dir:
            phi_dir.mkdir(parents=True, exist_ok=True)

        self.logger.info(
            "Extracting features: corpus=%s window=%s metric=%s D=%d workers=%d",
            self.config.corpus_path, self.window.label(), self.metric.name.value,
            lexicon.dimension, self.config.workers
        )

        with open(features_path, "w", encoding="utf-8", newline="") as handle:
            writer = FeatureWriter(handle, fmt, lexicon.dimension)
            outcomes = ordered_outcomes(self._jobs(corpus, lexicon), process_document, self.config.workers)
            for outcome in tqdm(outcomes, desc="Extracting", unit="doc", disable=not self.config.progress):
                for stage, seconds in outcome.timings.items():
                    self.report.add_time(stage, seconds)
                if not outcome.skipped:
                    try:
                        writer.write(outcome.row)
                    except ContractViolation as exc:
                        outcome = DocumentOutcome(doc_id=outcome.doc_id, reason="error", message=str(exc))
                if outcome.skipped:
                    self.report.skipped.append(SkipRecord(outcome.doc_id, outcome.reason or "error", outcome.message))
                    self.logger.warning("Skipped %s (%s): %s", outcome.doc_id, outcome.reason, outcome.message)
                    continue
                self.report.processed += 1
                if phi_dir and outcome.phi is not None:
                    write_matrix_csv(outcome.phi, phi_dir / f"{_safe_name(outcome.doc_id)}.csv")

        self.report.record_errors = [str(error) for error in corpus.errors]
        self.report.dimension = lexicon.dimension
        self.report.features_path = str(features_path)
        self.report.elapsed_seconds = time.perf_counter() - started
        self.report.config = self.config.to_dict()
        self.logger.info(
            "Done: %d processed, %d skipped, %d record errors in %.2fs",
            self.report.processed, len(self.report.skipped), len(self.report.record_errors),
            self.report.elapsed_seconds
        )
        if self.config.report_path:
            with open(self.config.report_path, "w", encoding="utf-8") as f:
                f.write(self.report.to_json(indent=2))
        return self.report


def _safe_name(doc_id: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in doc_id) or "document"


def summarize_stage_times(report: RunReport) -> List[str]:
    """Human-readable per-stage timing lines."""
    total = sum(report.stage_seconds.values()) or 1.0
    return [
        f"{stage:<10} {seconds:9.3f}s {100.0 * seconds / total:5.1f}%"
        for stage, seconds in sorted(report.stage_seconds.items(), key=lambda kv: -kv[1])
    ]
