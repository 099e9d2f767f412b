"""Multi-source fusion of learning traces for white-box PASS/FAIL prediction.

Subpackages and modules:

- ``dataset``: schema, CSV ingestion, joining by id, anonymization
- ``preprocess``: min-max normalization, equal-width binning, class cut-offs
- ``learners``: six rule/tree learners, Vote, rule export and interpreter
- ``selection``: correlation-based feature subset selection
- ``evaluation``: stratified cross-validation, accuracy, AUC
- ``harness``: experiment grid, synthetic cohorts, reports, ``fuse`` CLI
- ``kernels``: hot loops, compiled when available (see ``kernels.BACKEND``)
"""
from .dataset import Attribute, AttributeSchema, Dataset, IdMap, default_schema
from .errors import ConfigError, DataError, FuseError, RuleSyntaxError

__version__ = "0.1.0"

__all__ = ["Attribute", "AttributeSchema", "Dataset", "IdMap", "default_schema",
           "ConfigError", "DataError", "FuseError", "RuleSyntaxError", "__version__"]
