from .records import ParamRecord
from .registry import (DESCRIPTORS, IDENTITY_IDS, IdentityDescriptor, VerificationReport, cross_check_expansion,
                       descriptor, domain_violations, eval_side, resolve, verify)

__all__ = [
    "ParamRecord", "DESCRIPTORS", "IDENTITY_IDS", "IdentityDescriptor", "VerificationReport",
    "cross_check_expansion", "descriptor", "domain_violations", "eval_side", "resolve", "verify",
]
