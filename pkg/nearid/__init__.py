import logging
from logging import NullHandler

from nearid.maps import SmoothMap, map_from_spec, normalize  # noqa
from nearid.linear import factor_near_identity, gamma_of  # noqa
from nearid.decomposition import build_schedule, compute_B, full_decompose  # noqa
from nearid.lipschitz import certify_deviation, lemma4_suite  # noqa
from nearid.resnet import ResNetParams  # noqa
from nearid.functional import CompositionState  # noqa

# Set default logging handler to avoid "No handler found" warnings.
logging.getLogger(__name__).addHandler(NullHandler())
