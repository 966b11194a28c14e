import numpy as np
import pytest

import gammakinetics as gk


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger compilation of the jitted kernels before any timed test."""
    ens = gk.WealthEnsemble.equal(8)
    gk.sample_equilibrium(ens, gk.ExchangeParams(0.5, 64, seed=0), discard=0, every=8)
    state = gk.GasState.isotropic(8, 3, seed=0)
    gk.sample_equilibrium_energies(state, 64, seed=0, discard=0, every=8)
    gk.regularized_gamma_p_array(1.5, np.linspace(0.0, 5.0, 8))
    gk.log_gamma(2.5)
    gk.digamma(2.5)
