"""Toolkit for optimizing parameterized quantum circuits.

Exact statevector simulation with exact gradients and Hessians feeds an
iteratively preconditioned gradient method and the usual baselines
(gradient descent, Adam, L-BFGS).  Shipped benchmarks cover GHZ and W
state preparation and compilation of the quantum Fourier transform.
"""

__version__ = "0.1.0"

from .ansatz import CircuitTemplate, gate_list, param_index, random_init
from .costs import (CostFunction, FrobeniusInfidelity, MatrixDistance,
                    StateInfidelity, delta_theta, fidelity_histogram,
                    haar_random_states)
from .deriv import (StateJet, UnitaryJet, circuit_jet, fd_gradient, fd_hessian,
                    state_gradient, state_hessian, unitary_gradient)
from .experiments import (AggregateRecord, ConfigError, ExperimentConfig,
                          OptimizerOutcome, build_cost, experiment_config,
                          load_config, run_experiment, run_with_layer_growth)
from .optimizers import (Adam, GradientDescent, Ipg, IpgSchedule, Lbfgs,
                         MultiRunResult, NumericalAbortError, OptimizerConfig,
                         RunRecord, gd_step, ipg_schedule, ipg_step, multi_run,
                         optimize)
from .qasm import export_qasm, parse_qasm, qasm_text
from .sim import (GateSpec, apply_circuit, apply_cnot, apply_ry, apply_rz,
                  basis_state, circuit_unitary, cx, ghz_state, inner_product,
                  qft_unitary, ry, rz, w_state)

__all__ = [
    "__version__",
    "CircuitTemplate", "gate_list", "param_index", "random_init",
    "CostFunction", "StateInfidelity", "MatrixDistance", "FrobeniusInfidelity",
    "delta_theta", "fidelity_histogram", "haar_random_states",
    "StateJet", "UnitaryJet", "circuit_jet", "state_gradient", "state_hessian",
    "unitary_gradient", "fd_gradient", "fd_hessian",
    "AggregateRecord", "ConfigError", "ExperimentConfig", "OptimizerOutcome",
    "build_cost", "experiment_config", "load_config", "run_experiment",
    "run_with_layer_growth",
    "Adam", "GradientDescent", "Ipg", "IpgSchedule", "Lbfgs", "MultiRunResult",
    "NumericalAbortError", "OptimizerConfig", "RunRecord", "gd_step",
    "ipg_schedule", "ipg_step", "multi_run", "optimize",
    "export_qasm", "parse_qasm", "qasm_text",
    "GateSpec", "rz", "ry", "cx", "basis_state", "apply_rz", "apply_ry",
    "apply_cnot", "apply_circuit", "circuit_unitary", "qft_unitary",
    "ghz_state", "w_state", "inner_product",
]
