"""Numerical tolerances and size guards."""
from dataclasses import dataclass, fields, replace

# Largest Hilbert dimension of any single dense operator.
MAX_DIM = 4096
# Largest classical state space enumerated by brute force.
MAX_CLASSICAL_STATES = 2**20


@dataclass(frozen=True)
class Tolerances:
    psd: float = 1e-9              # relative smallest-eigenvalue floor
    rank: float = 1e-12            # support cutoff, multiplied by dimension
    identity: float = 1e-10        # relative Frobenius identity checks
    commute: float = 1e-9
    inverse: float = 1e-9          # per-edge inverse-pair conditions
    biorthogonality: float = 1e-10
    form: float = 1e-10            # agreement of alternative evaluation routes
    imag: float = 1e-10            # allowed imaginary part of Z, relative
    holant_classical: float = 1e-9
    holant_quantum: float = 1e-8
    condition: float = 1e8         # max condition number for inversion

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def override(self, **kwargs):
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


DEFAULT_TOL = Tolerances()
