import numpy as np
import pytest

from sdmawc.pmf import AuxChain, ChannelModel


def random_channel(rng, nx1=2, nx2=2, ns=2, ny=2, nz=2, alpha=1.0) -> ChannelModel:
    p_s = rng.dirichlet(np.full(ns, alpha))
    k = rng.dirichlet(np.full(ny * nz, alpha), size=(nx1, nx2, ns)).reshape(nx1, nx2, ns, ny, nz)
    return ChannelModel(p_s, k)


def random_aux(rng, channel: ChannelModel, nv=2, nu=2, nu1=2, nu2=2, alpha=1.0) -> AuxChain:
    cs = channel.sizes
    d = lambda k, size: rng.dirichlet(np.full(k, alpha), size=size)  # noqa: E731
    return AuxChain(d(nv, cs["S"]), d(nu, None), d(nu1, nu), d(nu2, nu),
                    d(cs["X1"], (nu, nu1, cs["S"])), d(cs["X2"], (nu, nu2, cs["S"])))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
