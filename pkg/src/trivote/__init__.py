"""Multiwinner committee elections with approve / indifferent / disapprove ballots."""

from trivote.axioms import (
    AxiomId,
    AxiomReport,
    GroupWitness,
    check,
    check_jr,
    check_ncr,
    check_pjr,
    check_spr,
    check_wa,
    check_war,
    check_wncr,
    check_wtjr,
    check_wtpjr,
    exists_committee,
    verify_witness,
)
from trivote.errors import (
    BudgetError,
    ConfigError,
    ConsistencyError,
    OverlapError,
    ParseError,
    RangeError,
    SizeError,
    TrivoteError,
)
from trivote.model import (
    CandidateSet,
    Committee,
    DichotomousProfile,
    ElectionInstance,
    TrichotomousBallot,
    is_decisive,
    meets_quota,
    position,
    positional_score,
    project_approvals,
    validate_instance,
)
from trivote.oracle import brute_force_check
from trivote.profile_io import load_profile, parse_profile, serialize_profile
from trivote.rules import RULES, RuleConfig, RuleOutcome, run_rule
from trivote.sampling import ExperimentConfig, SatisfactionTable, run_experiment

__version__ = "0.1.0"
