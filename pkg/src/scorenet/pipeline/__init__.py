"""Composite analyses built on the graph, spectral and SgnQ layers."""

from .dynamic import (DiversityRow, TrajectorySet, diversity_metrics, diversity_report, read_diversity,
                      read_trajectories, trajectories, write_diversity, write_trajectories)
from .ego import (CiterCiteeRow, EgoRow, citer_citee_scores, ego_diversity, ego_diversity_batch,
                  read_citer_citee, read_ego, write_citer_citee, write_ego)
from .metrics import adjusted_rand_index, matched_accuracy
from .research_map import ResearchMap, read_research_map, research_map, write_research_map
from .sankey import SankeyFlows, read_sankey, sankey, write_sankey, write_sankey_nodes
from .tree import CommunityTree, TreeNode, annotate, build_tree, read_tree, write_tree

__all__ = [
    "CiterCiteeRow", "CommunityTree", "DiversityRow", "EgoRow", "ResearchMap", "SankeyFlows",
    "TrajectorySet", "TreeNode", "adjusted_rand_index", "annotate", "build_tree", "citer_citee_scores",
    "diversity_metrics", "diversity_report", "ego_diversity", "ego_diversity_batch", "matched_accuracy",
    "read_citer_citee", "read_diversity", "read_ego", "read_research_map", "read_sankey", "read_trajectories",
    "read_tree", "research_map", "sankey", "trajectories", "write_citer_citee", "write_diversity",
    "write_ego", "write_research_map", "write_sankey", "write_sankey_nodes", "write_trajectories", "write_tree",
]
