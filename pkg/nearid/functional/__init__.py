from nearid.functional.sampled import SampledFunction, SampledLayer  # noqa
from nearid.functional.state import CompositionState  # noqa
from nearid.functional.frechet import (  # noqa
    BoundReport,
    DescentResult,
    DirectionalDerivative,
    LayerBound,
    build_delta,
    directional_derivative,
    functional_descent_demo,
    push_forward,
    residual,
    verify_theorem3_bound,
)
