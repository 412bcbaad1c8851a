"""The experiment subcommands.

Each handler receives the resolved config, its hash, the output directory
and the thread count as keyword arguments, writes its files and returns a
Report whose checks decide the exit code.
"""

# Standard Imports
import logging
import os

# ThirdParty Imports
import numpy as np

# Internal Imports
import nearid.errors as err
from nearid.cli import output, plots
from nearid.cli.registry import command
from nearid.cli.report import Report
from nearid.decomposition import (
    DecayRow,
    compute_B,
    decay_sweep,
    feasibility_threshold,
    fit_decay,
    full_decompose,
)
from nearid.decomposition.pipeline import PASS_ATOL, PASS_RTOL
from nearid.functional import CompositionState, functional_descent_demo, verify_theorem3_bound
from nearid.linear import factor_near_identity
from nearid.lipschitz import Ball, certify_deviation, lemma4_suite
from nearid.maps import map_from_spec, normalize, sample_ball, to_spec
from nearid.resnet import (
    ResNetParams,
    finite_difference_grad,
    forward,
    grad,
    loss,
    make_saddle_instance,
    train_gd,
)

logger = logging.getLogger(__name__)

COMPOSITION_TOL = 1e-8
RECONSTRUCTION_TOL = 1e-9
FD_GRAD_TOL = 1e-6

DECAY_COLUMNS = [
    "m",
    "epsilon_target",
    "max_pair",
    "max_jac",
    "max_cert",
    "composition_error",
    "pass",
]
CERTIFICATE_COLUMNS = [
    "layer",
    "kind",
    "pair_lower_bound",
    "jac_grid_estimate",
    "epsilon_target",
    "pass",
]
TRAJECTORY_COLUMNS = ["step", "loss", "grad_norm"]


def _unpack(payload):
    return payload["config"], payload["digest"], payload["out"], payload.get("threads", 1)


def _default_epsilon(smooth_map, m):
    normalized = normalize(smooth_map)
    return feasibility_threshold(compute_B(normalized.alpha, normalized.R, normalized.M), m)


def _within(estimate, target):
    return bool(estimate <= target * (1.0 + PASS_RTOL) + PASS_ATOL)


def _decompose(config, smooth_map, threads):
    epsilon = config["epsilon"]
    if epsilon is None:
        epsilon = _default_epsilon(smooth_map, config["m_nonlinear"])
        logger.info("Using the feasibility threshold epsilon=%.6g.", epsilon)
    return full_decompose(
        smooth_map,
        config["m_linear"],
        config["m_nonlinear"],
        epsilon,
        n_domain=config["n_domain"],
        n_pairs=config["n_pairs"],
        n_check=config["n_check"],
        seed=config["seed"],
        threads=threads,
    )


@command("decompose")
def decompose(**payload):
    """Decomposes a map into near-identity layers, optionally over a sweep of m."""
    config, digest, out, threads = _unpack(payload)
    smooth_map = map_from_spec(config["map"])
    stack = _decompose(config, smooth_map, threads)
    pair, jac = stack.max_nonlinear_certificate()
    rows = [
        DecayRow(
            m=stack.schedule.m,
            epsilon_target=stack.schedule.epsilon,
            max_pair=pair,
            max_jac=jac,
            composition_error=stack.composition_error,
        )
    ]
    result = {"map": to_spec(smooth_map), "stack": stack.to_manifest()}
    if config["sweep"]:
        rows = decay_sweep(
            smooth_map,
            ms=config["sweep"],
            m_linear=config["m_linear"],
            n_domain=config["n_domain"],
            n_pairs=config["n_pairs"],
            n_check=config["n_check"],
            seed=config["seed"],
            threads=threads,
        )
        result["sweep"] = {
            "rows": [row.to_dict() for row in rows],
            "fit": fit_decay(rows).to_dict() if len(rows) > 1 else None,
        }
    checks = {
        "certified": stack.certified,
        "composition": stack.composition_error <= COMPOSITION_TOL,
        "sweep": all(row.passed for row in rows),
        "sweep_composition": all(row.composition_error <= COMPOSITION_TOL for row in rows),
    }
    outputs = [
        output.write_json(out, "manifest.json", config, digest, result),
        output.write_csv(out, "decay.csv", digest, DECAY_COLUMNS, [r.to_dict() for r in rows]),
    ]
    return Report("decompose", result, checks=checks, outputs=outputs)


@command("certify")
def certify(**payload):
    """Certifies the deviation from the identity of a map or of its layers."""
    config, digest, out, threads = _unpack(payload)
    smooth_map = map_from_spec(config["map"])
    rows = []
    if config["stack"]:
        stack = _decompose(config, smooth_map, threads)
        for k, (layer, cert, target, verdict) in enumerate(
            zip(stack.layers, stack.certificates, stack.targets, stack.passes())
        ):
            rows.append(dict(cert.to_dict(), layer=k + 1, kind=layer.kind, epsilon_target=target))
            rows[-1]["pass"] = verdict
    else:
        cert = certify_deviation(
            smooth_map,
            Ball(smooth_map.R, smooth_map.d),
            n_pairs=config["n_pairs"],
            seed=config["seed"],
            n_grid=config["n_grid"],
            threads=threads,
        )
        target = config["epsilon"]
        rows.append(
            dict(
                cert.to_dict(),
                layer=1,
                kind=smooth_map.family,
                epsilon_target=target,
            )
        )
        rows[-1]["pass"] = None if target is None else _within(cert.estimate, target)

    result = {"map": to_spec(smooth_map), "certificates": rows}
    checks = {"certificates": all(row["pass"] is not False for row in rows)}
    if config["lemma4_alpha"] is not None:
        suite = lemma4_suite(
            smooth_map,
            config["lemma4_alpha"],
            Ball(smooth_map.R, smooth_map.d),
            n=config["n_pairs"],
            seed=config["seed"],
        )
        result["lemma4"] = suite.to_dict()
        checks["lemma4"] = suite.passed
    outputs = [
        output.write_json(out, "certify.json", config, digest, result),
        output.write_csv(out, "certificates.csv", digest, CERTIFICATE_COLUMNS, rows),
    ]
    return Report("certify", result, checks=checks, outputs=outputs)


@command("factor")
def factor(**payload):
    config, digest, out, _ = _unpack(payload)
    factorization = factor_near_identity(np.array(config["matrix"], dtype=float), config["m"])
    result = factorization.to_dict()
    checks = {
        "reconstruction": factorization.reconstruction_error <= RECONSTRUCTION_TOL,
        "within_target": factorization.within_target,
    }
    path = output.write_json(out, "factorization.json", config, digest, result)
    return Report("factor", result, checks=checks, outputs=[path])


@command("saddle")
def saddle(**payload):
    """Trains a ResNet from the all-zero parameters on a saddle instance.

    Inputs come in antithetic pairs, so at theta = 0 the gradient vanishes
    exactly although the loss is positive, and gradient descent never moves.
    """
    config, digest, out, _ = _unpack(payload)
    seed = config["seed"]
    if config["theta_star"] is not None:
        theta_star = ResNetParams.from_dict(config["theta_star"])
    else:
        shape = config["random_target"]
        theta_star = ResNetParams.random(
            shape["m"], shape["d"], shape["k"], bound=shape["bound"], seed=seed
        )
    data = make_saddle_instance(theta_star, config["n"], config["R"], seed=seed)
    if config["init"] == "zero":
        theta0 = ResNetParams.zeros(theta_star.m, theta_star.d, theta_star.k)
    else:
        theta0 = theta_star

    gradient = grad(theta0, data)
    fd_gradient = finite_difference_grad(theta0, data)
    trajectory = train_gd(theta0, data, config["lr"], config["steps"])
    moved = not trajectory.theta == theta0
    if trajectory.losses[0] == 0.0:
        verdict = "optimal"
    elif not moved:
        verdict = "stuck"
    else:
        verdict = "escaped"

    result = {
        "theta_star": theta_star.to_dict(),
        "generator": theta_star.digest(),
        "init": config["init"],
        "grad_norm": gradient.norm(),
        "fd_grad_max": float(np.abs(fd_gradient.flatten()).max(initial=0.0)),
        "loss": trajectory.losses[0],
        "loss_final": trajectory.losses[-1],
        "loss_target": loss(theta_star, data),
        "steps": trajectory.steps,
        "diverged": trajectory.diverged,
        "theta_moved": moved,
        "verdict": verdict,
    }
    checks = {
        "critical_point": result["grad_norm"] == 0.0 and result["fd_grad_max"] <= FD_GRAD_TOL,
        "diverged": not trajectory.diverged,
    }
    data.meta["config_sha256"] = digest
    dataset_path = os.path.join(out, "dataset.csv")
    data.save(dataset_path)
    outputs = [
        output.write_json(out, "saddle.json", config, digest, result),
        output.write_csv(out, "trajectory.csv", digest, TRAJECTORY_COLUMNS, trajectory.rows()),
        dataset_path,
    ]
    return Report("saddle", result, checks=checks, outputs=outputs)


def _frechet_networks(config):
    seed = config["seed"]
    if config["random"] is not None:
        shape = config["random"]
        network = ResNetParams.random(
            shape["m"], shape["d"], shape["k"], bound=shape["bound"], seed=seed
        )
        target = ResNetParams.random(
            shape["m"], shape["d"], shape["k"], bound=shape["target_bound"], seed=seed + 1
        )
        return network, target
    network = ResNetParams.from_dict(config["network"])
    if config["target"] is None:
        return network, network
    target = ResNetParams.from_dict(config["target"])
    if target.d != network.d:
        raise err.DimensionError(
            "The network acts on R^{} but the target on R^{}.".format(network.d, target.d)
        )
    return network, target


def _frechet_state(config):
    """Builds the state to check and the records naming its layers and targets."""
    seed = config["seed"]
    if config["map"] is not None:
        smooth_map = map_from_spec(config["map"])
        target_map = smooth_map
        if config["target_map"] is not None:
            target_map = map_from_spec(config["target_map"])
        if target_map.d != smooth_map.d:
            raise err.DimensionError(
                "The map acts on R^{} but the target map on R^{}.".format(
                    smooth_map.d, target_map.d
                )
            )
        if config["R"] > smooth_map.R:
            raise err.ConfigError(
                "Inputs of radius {} leave the ball of radius {} the map is decomposed on.".format(
                    config["R"], smooth_map.R
                )
            )
        epsilon = config["schedule_epsilon"]
        if epsilon is None:
            epsilon = _default_epsilon(smooth_map, config["m_nonlinear"])
        stack = full_decompose(
            smooth_map,
            config["m_linear"],
            config["m_nonlinear"],
            epsilon,
            seed=seed,
            certify=False,
        )
        X = sample_ball(config["n"], smooth_map.d, config["R"], seed=seed)
        state = CompositionState.from_stack(stack, X, target_map.eval(X), R=config["R"])
        return state, {"map": to_spec(smooth_map), "target_map": to_spec(target_map)}

    network, target = _frechet_networks(config)
    X = sample_ball(config["n"], network.d, config["R"], seed=seed)
    Y, _ = forward(target, X)
    state = CompositionState(network.layers(), X, Y, R=config["R"])
    return state, {"network": network.digest(), "target": target.digest()}


@command("frechet")
def frechet(**payload):
    """Checks the descent lower bound of each layer of a composition state.

    The layers are those of a ResNet or of the decomposition of a map.
    Targets are produced by a second network or map, so the sample is
    realizable and Q(h*) = 0.
    """
    config, digest, out, _ = _unpack(payload)
    state, sources = _frechet_state(config)
    epsilon = config["epsilon"]
    if epsilon is None:
        epsilon = state.certified_epsilon(n_pairs=config["n_pairs"], seed=config["seed"])
    bound = verify_theorem3_bound(
        state,
        epsilon=epsilon,
        slack=config["slack"],
        delta_floor=config["delta_floor"],
        t=config["t"],
    )
    result = bound.to_dict()
    result.update(sources)
    checks = {"bound": bound.passed}
    outputs = []

    if config["descent"] is not None:
        plan = config["descent"]
        descent = functional_descent_demo(
            state,
            plan["layer"],
            step=plan["step"],
            n_steps=plan["n_steps"],
            delta_floor=config["delta_floor"],
        )
        losses = list(descent.losses)
        result["descent"] = {
            "layer": plan["layer"],
            "losses": losses,
            "halvings": descent.halvings,
        }
        checks["descent"] = all(b <= a for a, b in zip(losses, losses[1:]))
        outputs.append(
            output.write_csv(
                out, "descent.csv", digest, ["step", "loss"], list(enumerate(losses))
            )
        )
    outputs.insert(0, output.write_json(out, "frechet.json", config, digest, result))
    return Report("frechet", result, checks=checks, outputs=outputs)


@command("plot")
def plot(**payload):
    config, digest, out, _ = _unpack(payload)
    svgs = [plots.render(path, out, digest) for path in config["inputs"]]
    return Report("plot", {"svgs": svgs}, outputs=svgs)
