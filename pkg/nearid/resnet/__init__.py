from nearid.resnet.layer import ResidualLayer, layer_deviation_bound  # noqa
from nearid.resnet.params import ResNetParams  # noqa
from nearid.resnet.network import (  # noqa
    ForwardTrace,
    finite_difference_grad,
    forward,
    grad,
    loss,
)
from nearid.resnet.dataset import Dataset  # noqa
from nearid.resnet.training import Trajectory, make_saddle_instance, train_gd  # noqa
