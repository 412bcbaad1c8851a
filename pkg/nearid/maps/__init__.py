from nearid.maps.base import Map, SmoothMap, FunctionMap  # noqa
from nearid.maps.families import (  # noqa
    AffineMap,
    IdentityMap,
    RadialTanhMap,
    TriangularFlow,
    ComposedMap,
)
from nearid.maps.normalize import NormalizedMap, normalize  # noqa
from nearid.maps.constants import estimate_constants, check_lemma2  # noqa
from nearid.maps.sampling import sample_ball, sample_sphere  # noqa
from nearid.maps.spec import map_from_spec, to_spec  # noqa
