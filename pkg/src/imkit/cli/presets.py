"""Built-in example systems with their exosystems and expected results."""

from __future__ import annotations

ECOLI_SYSTEM = {
    "schema": "imk.system/1",
    "kind": "nonlinear",
    "label": "ecoli",
    "state_dim": 2,
    "params": {"a1": 1.0, "a2": 1.0, "a3": 1.0, "a4": 1.0, "a5": 1.0, "a6": 1.0},
    "f": ["a1 - a2*x1 + a3*x2", "a5 - a6*x2"],
    "g": ["-a4*x1", "a4*x1"],
    "h": "(a1 + a5) - (a2*x1 + (a6 - a3)*x2)",
    "domain": [[0.001, 10.0], [0.001, 10.0]],
}

CONSTANTS_EXO = {
    "schema": "imk.exosystem/1",
    "kind": "constant",
    "label": "constants",
    "initial_box": [[0.5, 2.0]],
}

LINEAR_INTEGRATOR_SYSTEM = {
    # controller-form realization of s(s+3) / ((s+1)(s+2)(s+4))
    "schema": "imk.system/1",
    "kind": "linear",
    "label": "linear-integrator",
    "A": [[0, 1, 0], [0, 0, 1], [-8, -14, -7]],
    "b": [0, 0, 1],
    "c": [0, 3, 1],
}

LINEAR_HARMONIC_SYSTEM = {
    # controller-form realization of (s^2+4) / ((s+1)(s+2)(s+3))
    "schema": "imk.system/1",
    "kind": "linear",
    "label": "linear-harmonic",
    "A": [[0, 1, 0], [0, 0, 1], [-6, -11, -6]],
    "b": [0, 0, 1],
    "c": [4, 0, 1],
}

HARMONIC2_EXO = {
    "schema": "imk.exosystem/1",
    "kind": "harmonic",
    "label": "harmonic-omega-2",
    "omega": 2.0,
    "initial_box": [[-2.0, 2.0], [-2.0, 2.0]],
}

ECOLI_README = """# Receptor adaptation example (ecoli)

Two-state receptor model with ligand concentration as input:

    x1' = a1 - a2 x1 + a3 x2 - a4 x1 u
    x2' = a5 - a6 x2 + a4 x1 u
    y   = (a1 + a5) - (a2 x1 + (a6 - a3) x2)

Expected results (`imk analyze ecoli.json constants.json`):

* relative degree r = 1 (sampled grade: the input coefficient D*x1 with
  D = a2*a4 + (a3 - a6)*a4 is positive on the declared positive domain);
* the normalized input direction is constant, so completeness and
  commutativity hold (proven);
* with unit parameters the system rejects every constant input: trials with
  u in [0.5, 2] converge, equilibrium at (2, 1 + 2u);
* internal model: complement coordinate z2 = x1 + x2 with z2' = y, output
  map phi(z2) = (z2 - 3)/2, which reproduces each constant input.
"""

LINEAR_INTEGRATOR_README = """# Linear integrator example (linear-integrator)

Controller-form realization of S = s(s+3) / ((s+1)(s+2)(s+4)) with the
constants exosystem (pi = s).

Expected results (`imk analyze linear_integrator.json constants.json`):

* division of the denominator by the zeros polynomial: a = s + 4, b = 2s + 8,
  feedback block (2s + 8) / (s^2 + 3s) contains the integrator 1/s;
* G*S is stable (poles -1, -2, -4 after the zero at 0 cancels pi = s);
* pi divides p exactly with p0 = s + 3; the internal model is the scalar
  integrator (companion matrix [0], output row [1]);
* embedding residuals are at roundoff and the simulated internal model
  reproduces every constant input.
"""

LINEAR_HARMONIC_README = """# Harmonic rejection example (linear-harmonic)

Controller-form realization of S = (s^2 + 4) / ((s+1)(s+2)(s+3)) with the
frequency-2 harmonic exosystem (pi = s^2 + 4).

Expected results (`imk analyze linear_harmonic.json harmonic2.json`):

* G*S is stable: the zeros at +/- 2i cancel the exosystem poles, leaving
  poles -1, -2, -3;
* pi divides p exactly with p0 = 1; the internal model is the harmonic
  companion [[0, 1], [-4, 0]] with output row [1, 0];
* embedding residuals are at roundoff and the simulated internal model
  reproduces every sampled sinusoid of frequency 2.
"""

PRESETS = {
    "ecoli": {
        "system": ("ecoli.json", ECOLI_SYSTEM),
        "exosystem": ("constants.json", CONSTANTS_EXO),
        "readme": ("README_ecoli.md", ECOLI_README),
    },
    "linear-integrator": {
        "system": ("linear_integrator.json", LINEAR_INTEGRATOR_SYSTEM),
        "exosystem": ("constants.json", CONSTANTS_EXO),
        "readme": ("README_linear_integrator.md", LINEAR_INTEGRATOR_README),
    },
    "linear-harmonic": {
        "system": ("linear_harmonic.json", LINEAR_HARMONIC_SYSTEM),
        "exosystem": ("harmonic2.json", HARMONIC2_EXO),
        "readme": ("README_linear_harmonic.md", LINEAR_HARMONIC_README),
    },
}
