"""
A lossless transmission line driven by a voltage pulse
======================================================

Line of length 10 with L = 1 and C = 0.01, split into 20 elements. The
left end sees one period of sin(pi t) on [0, 2], the right end is open.
Once the pulse is over the stored energy must stay put, and while it is
on the energy rate must equal the supplied power.
"""

import numpy as np

from phnet1d import (Domain, Scenario, build_uniform_mesh, compose_chain,
                     quadratic_density, run, sine_pulse, sparsity_report)

mesh = build_uniform_mesh(Domain(0.0, 10.0), 20)
model = compose_chain(mesh)
print("state dimension:", model.state_dim)
print("\n".join(sparsity_report(model).lines()))

scenario = Scenario(model, quadratic_density(1.0), quadratic_density(0.01),
                    sine_pulse(), t_end=10.0, dt=1e-3)
result = run(scenario)

# energy after the pulse
print("H(2) =", result.hamiltonian[2000], " H(10) =", result.hamiltonian[-1])
print("relative drift on [2, 10]:", result.drift(2.0))

# discrete power balance
print("max |dH/dt - y^T u| / max |y^T u|:",
      result.max_power_residual / result.max_power)

# current at the driven end and voltage at the open end
for t in (1.0, 2.0, 4.0, 6.0, 8.0):
    k = int(round(t / scenario.dt))
    print(f"t = {t:4.1f}   I(0) = {result.outputs[k, 0]: .5f}   "
          f"V(10) = {-result.outputs[k, 1]: .5f}")
