from nearid.linear.factor import (  # noqa
    C_F,
    LinearFactorization,
    allocate_seats,
    factor_near_identity,
    gamma_of,
    rotation_log,
)
