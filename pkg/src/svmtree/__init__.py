"""Multi-class SVM reductions: entropy and bound driven decision trees
(IB-DTree, IBGE-DTree), grouped binary trees, and OVO/OVA/DDAG/ADAG
baselines with a cross-validation benchmark harness."""

__version__ = "0.1.0"

from .data import Dataset, DatasetError, FoldPlan, load_csv, make_folds, normalize
from .svm import (BinaryModel, KernelSpec, ModelStats, TrainConfig,
                  compute_stats, decision, train)
from .metrics import (GenErrorParams, SplitCounts, entropy,
                      generalization_error_bound, split_counts)
from .baselines import (OvaPool, OvoPool, classify_adag, classify_ddag,
                        classify_ova, classify_ovo_maxwins, train_ova_pool,
                        train_ovo_pool)
from .trees import (GroupingResult, TreeBuildError, TreeNode, build_bts_g,
                    build_cbts_g, build_ib_dtree, build_ibge_dtree,
                    classify_tree, group_by_majority)
from .evaluation import (CellResult, EvaluationReport, FoldResult, HyperGrid,
                         PairwiseResult, WilcoxonResult, emit_report, run_cv,
                         wilcoxon_signed_rank)
