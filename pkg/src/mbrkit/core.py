"""Domain types, the metric registry, and metric-group membership.

The registry is a fixed table of the 17 metrics the toolkit knows about:
12 reference-based (usable as MBR utilities and for reference-based
evaluation) and 5 quality-estimation metrics (reference-free). Orientation
is a property of the metric id: MetricX, MetricX-QE and TER improve
downward, everything else improves upward.

Group membership is language-conditional: AfriCOMET / AfriCOMET-QE join
groups only for African-language targets, IndicCOMET only for Indic
targets. The classification is a static table keyed by target language
code; unknown targets belong to neither family.

All tables are immutable after import and safe for concurrent reads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import UnknownGroupError, UnknownMetricError


class MetricKind(str, Enum):
    REFERENCE_BASED = "reference_based"
    QE = "qe"


class Orientation(str, Enum):
    HIGHER_BETTER = "higher_better"
    LOWER_BETTER = "lower_better"

    def better(self, a: float, b: float) -> bool:
        """True when score a is strictly better than score b."""
        return a > b if self is Orientation.HIGHER_BETTER else a < b


class Provenance(str, Enum):
    NATIVE = "native"      # computed in-process (lexical metrics)
    EXTERNAL = "external"  # ingested from score files (neural metrics)


@dataclass(frozen=True)
class MetricSpec:
    id: str
    kind: MetricKind
    orientation: Orientation
    provenance: Provenance


@dataclass(frozen=True)
class CandidateSet:
    """One source segment with its n candidate translations.

    Candidate order is stable and index-addressable; by file convention
    index 0 holds the greedy/base output when one exists.
    """

    segment_id: str
    source: str
    candidates: tuple[str, ...]
    language_pair: str
    reference: str | None = None
    doc_context: str | None = None

    def __post_init__(self):
        if len(self.candidates) < 1:
            raise ValueError(f"segment {self.segment_id!r}: needs at least one candidate")
        if not isinstance(self.candidates, tuple):
            object.__setattr__(self, "candidates", tuple(self.candidates))

    @property
    def n(self) -> int:
        return len(self.candidates)


@dataclass(frozen=True)
class SelectionRecord:
    """The candidate a selection strategy picked for one segment."""

    segment_id: str
    system_id: str
    selected_index: int
    selected_text: str


@dataclass(frozen=True)
class SegmentEvaluation:
    """Score of one system's selected output on one segment.

    metric_id is a registry id or "<metric>:mbr" for pseudoreference-based
    scores. language_pair is carried along when known so correlation
    analyses can pool observations per pair.
    """

    segment_id: str
    system_id: str
    metric_id: str
    score: float
    language_pair: str | None = None


@dataclass(frozen=True)
class MqmRecord:
    """Human MQM error score for one (segment, system); 0..25, lower better."""

    segment_id: str
    system_id: str
    mqm_score: float


def _spec(mid: str, kind: MetricKind, orientation: Orientation, provenance: Provenance) -> MetricSpec:
    return MetricSpec(mid, kind, orientation, provenance)


_REF = MetricKind.REFERENCE_BASED
_QE = MetricKind.QE
_UP = Orientation.HIGHER_BETTER
_DOWN = Orientation.LOWER_BETTER
_NAT = Provenance.NATIVE
_EXT = Provenance.EXTERNAL

_REGISTRY: dict[str, MetricSpec] = {
    s.id: s
    for s in (
        _spec("MetricX", _REF, _DOWN, _EXT),
        _spec("XCOMET-XXL", _REF, _UP, _EXT),
        _spec("XCOMET-XL", _REF, _UP, _EXT),
        _spec("COMET22", _REF, _UP, _EXT),
        _spec("AfriCOMET", _REF, _UP, _EXT),
        _spec("IndicCOMET", _REF, _UP, _EXT),
        _spec("BLEURT", _REF, _UP, _EXT),
        _spec("YiSi", _REF, _UP, _EXT),
        _spec("sentBLEU", _REF, _UP, _NAT),
        _spec("chrF", _REF, _UP, _NAT),
        _spec("chrF++", _REF, _UP, _NAT),
        _spec("TER", _REF, _DOWN, _NAT),
        _spec("MetricX-QE", _QE, _DOWN, _EXT),
        _spec("CometKiwi23-XXL", _QE, _UP, _EXT),
        _spec("CometKiwi23-XL", _QE, _UP, _EXT),
        _spec("CometKiwi22", _QE, _UP, _EXT),
        _spec("AfriCOMET-QE", _QE, _UP, _EXT),
    )
}

# Lowercased alias -> canonical id. Covers the canonical names themselves
# plus common spellings used in file keys.
_ALIASES: dict[str, str] = {mid.lower(): mid for mid in _REGISTRY}
_ALIASES.update(
    {
        "metricx-23": "MetricX",
        "metricx23": "MetricX",
        "metricx-qe-23": "MetricX-QE",
        "bleu": "sentBLEU",
        "sentence-bleu": "sentBLEU",
        "sent-bleu": "sentBLEU",
        "yisi-1": "YiSi",
        "comet-22": "COMET22",
        "chrf2": "chrF",
        "chrfpp": "chrF++",
        "chrf++2": "chrF++",
    }
)

LEXICAL_METRICS: tuple[str, ...] = ("sentBLEU", "chrF", "chrF++", "TER")

#: Suffix marking score vectors computed against the true reference,
#: used when evaluating selections with external reference-based metrics.
AT_REF_SUFFIX = "@ref"

#: Suffix marking pseudoreference-based evaluation labels ("chrF:mbr").
MBR_SUFFIX = ":mbr"


def strip_label_suffix(label: str) -> tuple[str, str]:
    """Split '<metric>@ref' / '<metric>:mbr' labels into (base id, suffix)."""
    for suffix in (AT_REF_SUFFIX, MBR_SUFFIX):
        if label.endswith(suffix):
            return label[: -len(suffix)], suffix
    return label, ""


def canonical_metric_id(metric_id: str) -> str:
    """Resolve an alias (case-insensitive) to the canonical metric id."""
    if metric_id in _REGISTRY:
        return metric_id
    try:
        return _ALIASES[metric_id.lower()]
    except KeyError:
        raise UnknownMetricError(metric_id) from None


def registry_lookup(metric_id: str) -> MetricSpec:
    """Return the MetricSpec for a metric id or alias."""
    return _REGISTRY[canonical_metric_id(metric_id)]


def all_metric_ids() -> tuple[str, ...]:
    return tuple(_REGISTRY)


def is_lexical(metric_id: str) -> bool:
    return canonical_metric_id(metric_id) in LEXICAL_METRICS


# --- language-pair classification -------------------------------------------

_AFRICAN_TARGETS = frozenset({"sw", "ha", "ig", "so"})
_INDIC_TARGETS = frozenset({"hi", "ta", "gu", "ml"})


def target_language(language_pair: str) -> str:
    """Target code of a 'src-tgt' pair tag ('' when the tag is malformed)."""
    _, sep, tgt = language_pair.partition("-")
    return tgt if sep else ""


def is_african_pair(language_pair: str) -> bool:
    return target_language(language_pair) in _AFRICAN_TARGETS


def is_indic_pair(language_pair: str) -> bool:
    return target_language(language_pair) in _INDIC_TARGETS


# --- metric groups -----------------------------------------------------------

# Each group is (base members, African-only members, Indic-only members),
# with conditional members appended after the base list.
_GROUPS: dict[str, tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]] = {
    "all": (
        (
            "MetricX", "MetricX-QE", "XCOMET-XXL", "XCOMET-XL",
            "CometKiwi23-XXL", "CometKiwi23-XL", "CometKiwi22", "COMET22",
            "BLEURT", "YiSi", "chrF", "chrF++", "sentBLEU", "TER",
        ),
        ("AfriCOMET", "AfriCOMET-QE"),
        ("IndicCOMET",),
    ),
    "qe": (
        ("MetricX-QE", "CometKiwi23-XXL", "CometKiwi23-XL", "CometKiwi22"),
        ("AfriCOMET-QE",),
        (),
    ),
    "top": (
        ("MetricX", "MetricX-QE", "XCOMET-XXL", "XCOMET-XL",
         "CometKiwi23-XXL", "CometKiwi23-XL"),
        (),
        (),
    ),
    "topQe": (
        ("MetricX-QE", "CometKiwi23-XXL", "CometKiwi23-XL"),
        (),
        (),
    ),
    "mxmxqe": (
        ("MetricX", "MetricX-QE"),
        (),
        (),
    ),
    "noLex": (
        (
            "MetricX", "MetricX-QE", "XCOMET-XXL", "XCOMET-XL",
            "CometKiwi23-XXL", "CometKiwi23-XL", "CometKiwi22", "COMET22",
            "BLEURT", "YiSi",
        ),
        ("AfriCOMET", "AfriCOMET-QE"),
        ("IndicCOMET",),
    ),
    "noNC": (
        ("MetricX", "MetricX-QE", "CometKiwi22", "COMET22", "BLEURT", "YiSi",
         "chrF", "chrF++", "sentBLEU", "TER"),
        ("AfriCOMET", "AfriCOMET-QE"),
        ("IndicCOMET",),
    ),
    "noNCnoLex": (
        ("MetricX", "MetricX-QE", "COMET22", "BLEURT", "YiSi"),
        ("AfriCOMET", "AfriCOMET-QE"),
        ("IndicCOMET",),
    ),
    "noNCQe": (
        ("MetricX-QE",),
        ("AfriCOMET-QE",),
        (),
    ),
}

GROUP_NAMES: tuple[str, ...] = tuple(_GROUPS)


def group_members(name: str, language_pair: str) -> list[str]:
    """Ordered metric ids of a group for a given language pair."""
    try:
        base, african, indic = _GROUPS[name]
    except KeyError:
        raise UnknownGroupError(name) from None
    members = list(base)
    if is_african_pair(language_pair):
        members.extend(african)
    if is_indic_pair(language_pair):
        members.extend(indic)
    return members


def group_members_of_kind(name: str, language_pair: str, kind: MetricKind) -> list[str]:
    """Group members restricted to one metric kind, order preserved."""
    return [m for m in group_members(name, language_pair) if _REGISTRY[m].kind is kind]
