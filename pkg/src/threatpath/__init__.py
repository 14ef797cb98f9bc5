"""threatpath: explainable mapping of CVEs to weaknesses, techniques and actors."""

from .records import AttackTechnique, CapecPattern, CveRecord, CweEntry, ThreatActor
from .snapshot import KnowledgeSnapshot, build_snapshot, load_snapshot, save_snapshot
from .hierarchy import WeaknessHierarchy, build_hierarchy
from .textprep import SynonymCodebook, TextNormalizer, build_codebook, normalize
from .vectorize import FeatureVector, NgramTfidfVectorizer, Vocabulary, fit_vocabulary, transform
from .classifier import (
    CwePrediction,
    HierarchicalCweClassifier,
    HierarchicalModel,
    TrainingConfig,
    load_model,
    save_model,
    train_hierarchy,
    train_node,
)
from .mapping import (
    ExplanationChain,
    MappingEdge,
    MappingTable,
    analyze_cve,
    build_cwe_to_technique,
    build_mapping_table,
    build_technique_to_actor,
)
from .baseline import TechniqueSimilarityIndex, cosine_similarity, load_dense_vectors
from .metrics import (
    GroundTruthEntry,
    ScoreReport,
    combined_mrr,
    load_ground_truth,
    mean_reciprocal_rank,
    micro_macro_scores,
    reciprocal_rank,
    split_dataset,
    stratified_sample,
    threshold_sweep,
)

__version__ = "0.1.0"
