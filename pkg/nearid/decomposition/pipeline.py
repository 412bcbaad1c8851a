"""Full decomposition of a smooth map into a stack of near-identity layers.

For a map h with anchor x0 and D0 = Dh(x0),

    h(x) = D0 h~(x - x0) + h(x0),

so h is the translation by -x0, the nonlinear split of the normalized
map h~, the linear factors of D0 and the translation by +h(x0), applied
in that order.
"""

# Standard Imports
import logging

# ThirdParty Imports
import numpy as np

# Internal Imports
import nearid.errors as err
from nearid.decomposition.layers import LAYER_TOL, LinearLayer, NonlinearLayer, Translation
from nearid.decomposition.schedule import build_schedule
from nearid.linear import factor_near_identity
from nearid.lipschitz import Cloud, certify_deviation
from nearid.maps import normalize, sample_ball

logger = logging.getLogger(__name__)

PASS_RTOL = 1e-9
PASS_ATOL = 1e-9


class LayerStack(object):
    """An ordered list of layers whose composition equals a map.

    Attributes:
        layers (list): Translation, NonlinearLayer and LinearLayer objects,
            first applied first.
        schedule (Schedule): The schedule of the nonlinear layers.
        factorization (LinearFactorization): The factors of Dh(x0), or None.
        certificates (list): One LipschitzCertificate per layer, or None.
        targets (list): The deviation each layer is expected to stay under.
        composition_error (float): max |stack(x) - h(x)| over sampled x.
    """

    def __init__(self, layers, schedule=None, factorization=None):
        self.layers = list(layers)
        self.schedule = schedule
        self.factorization = factorization
        self.certificates = [None] * len(self.layers)
        self.targets = [None] * len(self.layers)
        self.composition_error = None
        self.n_check = 0

    def __len__(self):
        return len(self.layers)

    def __iter__(self):
        return iter(self.layers)

    def __getitem__(self, index):
        return self.layers[index]

    @property
    def d(self):
        return self.layers[0].d

    def eval(self, x, upto=None):
        return eval_stack(self, x, upto)

    def passes(self):
        """Per-layer verdicts: certified deviation within its target."""
        verdicts = []
        for cert, target in zip(self.certificates, self.targets):
            if cert is None or target is None:
                verdicts.append(None)
                continue
            verdicts.append(cert.estimate <= target * (1.0 + PASS_RTOL) + PASS_ATOL)
        return verdicts

    @property
    def certified(self):
        return all(v is not False for v in self.passes())

    def max_nonlinear_certificate(self):
        """Largest pair and grid estimates over the nonlinear layers."""
        certs = [
            c
            for layer, c in zip(self.layers, self.certificates)
            if layer.kind == "nonlinear" and c is not None
        ]
        if not certs:
            return 0.0, 0.0
        pair = max(c.pair_lower_bound for c in certs)
        jac = max(c.jac_grid_estimate or 0.0 for c in certs)
        return pair, jac

    def to_manifest(self):
        rows = []
        for k, (layer, cert, target, verdict) in enumerate(
            zip(self.layers, self.certificates, self.targets, self.passes())
        ):
            row = {"layer": k + 1, "epsilon_target": target, "pass": verdict}
            row.update(layer.describe())
            row["certificate"] = None if cert is None else cert.to_dict()
            rows.append(row)
        return {
            "n_layers": len(self.layers),
            "schedule": None if self.schedule is None else self.schedule.to_dict(),
            "linear": None
            if self.factorization is None
            else {
                k: v for k, v in self.factorization.to_dict().items() if k != "factors"
            },
            "composition_error": self.composition_error,
            "n_check": self.n_check,
            "certified": self.certified,
            "layers": rows,
        }


def eval_stack(stack, x, upto=None):
    """Applies layers 1..upto (all by default) to x.

    Args:
        stack (LayerStack or list): The layers.
        x (array): A point or an (n, d) batch.
        upto (int): Number of layers to apply, 0 <= upto <= len(stack).

    Raises:
        LayerError: A layer failed to evaluate.
    """
    layers = list(stack)
    upto = len(layers) if upto is None else int(upto)
    if not 0 <= upto <= len(layers):
        raise err.LayerError("upto must lie in [0, {}].".format(len(layers)), upto)
    out = np.array(x, dtype=float)
    for k, layer in enumerate(layers[:upto]):
        try:
            out = layer.eval(out)
        except err.InversionError as e:
            raise err.LayerError(str(e), k + 1)
    return out


def split(normalized, schedule, tol=LAYER_TOL):
    """Splits a normalized map into the layers h_i = g_i o g_{i-1}^-1.

    Raises:
        InfeasibleScheduleError: The schedule is infeasible.
    """
    if not schedule.feasible:
        raise err.InfeasibleScheduleError(
            "No feasible schedule for m={} and epsilon={:.4g}.".format(
                schedule.m, schedule.epsilon
            ),
            schedule,
        )
    a_prev = (None,) + schedule.a[:-1]
    return [
        NonlinearLayer(i + 1, normalized, a_prev[i], schedule.a[i], tol=tol)
        for i in range(schedule.m)
    ]


def full_decompose(
    smooth_map,
    m_linear,
    m_nonlinear,
    epsilon,
    *,
    n_domain=256,
    n_pairs=1000,
    n_check=1000,
    seed=0,
    threads=1,
    tol=LAYER_TOL,
    certify=True,
):
    """Decomposes a map into translations, nonlinear layers and linear factors.

    Args:
        smooth_map (SmoothMap): The map h with det(Dh(x0)) > 0.
        m_linear (int): Number of linear factors of Dh(x0).
        m_nonlinear (int): Number of nonlinear layers, at least 2.
        epsilon (float): Target deviation of the nonlinear layers.
        n_domain (int): Size of the quasi-random sample of the ball whose
            images are the certification domains.
        n_pairs (int): Pairs per layer certificate.
        n_check (int): Samples for the composition error.
        seed (int): Seed for every draw.
        threads (int): Worker threads for certification.
        tol (float): Inversion tolerance inside the nonlinear layers.
        certify (bool): Attach per-layer certificates.

    Returns:
        A LayerStack.

    Raises:
        OrientationError: det(Dh(x0)) <= 0.
        InfeasibleScheduleError: m_nonlinear is too small for epsilon.
    """
    smooth_map.check_orientation()
    if smooth_map.constants_source == "estimated":
        logger.warning(
            "Decomposing with estimated constants; the schedule is not certified."
        )
    normalized = normalize(smooth_map)
    schedule = build_schedule(
        m_nonlinear, epsilon, normalized.alpha, normalized.R, normalized.M
    )
    nonlinear = split(normalized, schedule, tol=tol)
    x0 = smooth_map.x0
    D0 = smooth_map.jacobian(x0)
    factorization = factor_near_identity(D0, m_linear)
    linear = [LinearLayer(A) for A in reversed(factorization.factors)]
    layers = [Translation(-x0)] + nonlinear + linear + [Translation(smooth_map.eval(x0))]

    stack = LayerStack(layers, schedule=schedule, factorization=factorization)
    for k, layer in enumerate(layers):
        if layer.kind == "nonlinear":
            stack.targets[k] = schedule.epsilon
        elif layer.kind == "linear":
            stack.targets[k] = factorization.target_bound
        else:
            stack.targets[k] = 0.0

    X = sample_ball(n_check, smooth_map.d, smooth_map.R, seed=seed + 1)
    diff = eval_stack(stack, X) - smooth_map.eval(X)
    stack.composition_error = float(np.linalg.norm(diff, axis=1).max(initial=0.0))
    stack.n_check = n_check

    if certify:
        cloud = sample_ball(n_domain, smooth_map.d, smooth_map.R, seed=seed, method="halton")
        for k, layer in enumerate(layers):
            stack.certificates[k] = certify_deviation(
                layer, Cloud(cloud), n_pairs=n_pairs, seed=seed, threads=threads
            )
            cloud = layer.eval(cloud)
    logger.debug(
        "Decomposed into %s layers, composition error %.3e.",
        len(layers),
        stack.composition_error,
    )
    return stack
