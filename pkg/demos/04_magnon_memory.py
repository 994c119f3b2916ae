# %% [markdown]
# # Magnon memory
#
# An electron spin sits at the centre of a ring of `N` nuclear spins with
# ferromagnetic exchange.  With homogeneous hyperfine couplings only the
# symmetric spin wave talks to the electron, and the pair is a
# Jaynes-Cummings system with coupling `g = lam sqrt(s / 2N)`.  Half a Rabi
# cycle writes the electron state into the magnon.

# %%
import numpy as np

from spinbus import MemoryParams, analytic_storage_fidelity, chi_profile, decay_rate
from spinbus import exact_ring_validation, simulate_inhomogeneous, simulate_storage_map
from spinbus.memory import decode, gaussian_lambda_profile

# %% [markdown]
# ## Storage map
#
# After `T = pi / 2g` the boson holds `w_nm = rho_nm exp(i (m - n) pi / 2)`:
# a fixed phase gate away from the input.

# %%
params = MemoryParams(N=40, J=1.0, lam=1.0)
rho = np.array([[0.3, 0.2 - 0.35j], [0.2 + 0.35j, 0.7]])
rep = simulate_storage_map(params, rho)
print("stored w =\n", np.round(rep.w, 6))
print("decoded  =\n", np.round(decode(rep.w), 6))
print(f"residual {rep.residual:.1e}, fidelity {rep.fidelity:.12f}")

# %% [markdown]
# The same map, checked against the exact spin-1/2 ring in the sector with
# one excitation:

# %%
for N in (4, 8, 10):
    v = exact_ring_validation(MemoryParams(N, J=1.0, lam=0.5))
    print(f"N={N}: dispersion error {v.dispersion_error:.1e}, storage residual {v.storage_residual:.1e}")

# %% [markdown]
# ## Inhomogeneous coupling
#
# A Gaussian hyperfine profile leaks amplitude into the other magnon
# modes.  The golden-rule rate `gamma` feeds a closed-form fidelity that
# can be compared with the evolution of the full mode Hamiltonian.

# %%
N = 512
g = np.sqrt(0.5 / (2 * N))
params = MemoryParams(N, J=2 * g, lam=1.0, sigma=0.2)
modes = chi_profile(gaussian_lambda_profile(N, 0.2), 1.0, 0.2)
gamma = decay_rate(params, modes)
t = np.linspace(0, np.pi / g, 9)
sim = simulate_inhomogeneous(params, modes, t).values
ana = analytic_storage_fidelity(t, gamma, g)
print(f"gamma/g = {gamma / g:.4f}")
for ti, a, b in zip(t * g, sim, ana):
    print(f"g t = {ti:5.3f}   simulated {a:.5f}   closed form {b:.5f}")
