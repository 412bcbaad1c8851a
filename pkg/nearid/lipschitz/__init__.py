from nearid.lipschitz.domains import Ball, Cloud  # noqa
from nearid.lipschitz.certify import (  # noqa
    LipschitzCertificate,
    certify_deviation,
    jacobian_deviation,
    sample_pairs,
)
from nearid.lipschitz.lemma4 import Lemma4Report, PartResult, lemma4_suite  # noqa
