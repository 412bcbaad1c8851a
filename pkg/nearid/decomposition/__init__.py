from nearid.decomposition.schedule import (  # noqa
    Schedule,
    build_schedule,
    compute_B,
    feasibility_threshold,
    minimal_feasible_m,
)
from nearid.decomposition.layers import LinearLayer, NonlinearLayer, Translation  # noqa
from nearid.decomposition.pipeline import LayerStack, eval_stack, full_decompose, split  # noqa
from nearid.decomposition.sweep import DecayFit, DecayRow, decay_sweep, fit_decay  # noqa
