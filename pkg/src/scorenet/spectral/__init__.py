"""Eigenpairs, SCORE-family embeddings, k-means and mixed-membership estimation."""

from .cluster import canonical_labels, modified_score_cluster
from .eigen import EigenError, EigenPairs, ScreeRow, scree_data, top_eigs, top_eigs_matrix
from .embedding import Embedding, EmbeddingError, dynamic_embed, project_window, score_embed, truncate_embedding
from .export import read_embedding, read_scree, write_embedding, write_scree
from .kmeans import KMeansResult, kmeans
from .population import PopulationError, population_dynamic_embed, population_pairs, structure_matrix
from .simplex import SimplexError, SimplexModel, barycentric, estimate_memberships, membership_calibration, vertex_hunt

__all__ = [
    "EigenError", "EigenPairs", "Embedding", "EmbeddingError", "KMeansResult", "PopulationError",
    "ScreeRow", "SimplexError", "SimplexModel", "barycentric", "canonical_labels", "dynamic_embed",
    "estimate_memberships", "kmeans", "membership_calibration", "modified_score_cluster",
    "population_dynamic_embed", "population_pairs", "project_window", "read_embedding", "read_scree",
    "score_embed", "scree_data", "structure_matrix", "top_eigs", "top_eigs_matrix", "truncate_embedding",
    "vertex_hunt", "write_embedding", "write_scree",
]
