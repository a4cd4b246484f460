"""Exact density-matrix reference for small spin/mode systems.

For one or two seven-level spins coupled to a truncated bosonic mode, the
full master equation is integrated without any closure.  This is the
ground truth against which the moment equations are gated: the same
physical channels (laser pump cycle, spin-lattice mixing, dephasing,
thermal mode contact, coherent coupling, optional drive) are built as
sparse operators, assembled into one superoperator acting on the
vectorized density matrix, and propagated with an explicit high-order
integrator.

The module also defines the frozen comparison fixtures used by the test
suite and by the command-line ``oracle-check``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from .cumulant import (DriveParams, DrivenMomentState, MomentState, Phase,
                       integrate)
from .errors import DomainError, TruncationWarning
from .params import (NvRates, ResonatorParams, SystemParams,
                     effective_temperature)

__all__ = [
    "DensityState", "Liouvillian", "OracleResult", "OracleFixture",
    "GateResult", "build_liouvillian", "evolve", "oracle_fixtures",
    "run_gate", "run_oracle_suite",
]

_SPIN_DIM = 7


def _mat_unit(i: int, j: int) -> sp.csr_matrix:
    """|i><j| on the seven-level spin space (1-based indices)."""
    m = sp.lil_matrix((_SPIN_DIM, _SPIN_DIM))
    m[i - 1, j - 1] = 1.0
    return m.tocsr()


def _destroy(fock_cutoff: int) -> sp.csr_matrix:
    data = np.sqrt(np.arange(1, fock_cutoff))
    return sp.csr_matrix(sp.diags(data, offsets=1))


def _embed(ops_per_slot) -> sp.csr_matrix:
    out = ops_per_slot[0]
    for op in ops_per_slot[1:]:
        out = sp.kron(out, op, format="csr")
    return out


@dataclass
class DensityState:
    """Dense density matrix of ``n_spins`` seven-level spins and one mode."""

    n_spins: int
    fock_cutoff: int
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def product(cls, spin_pops, n_spins: int, fock_cutoff: int,
                occupation: float) -> "DensityState":
        """Product of identical diagonal spin states and a (truncated)
        thermal mode state."""
        spin_pops = np.asarray(spin_pops, dtype=float)
        if spin_pops.size != _SPIN_DIM or abs(spin_pops.sum() - 1.0) > 1e-9:
            raise DomainError("spin populations must be 7 values summing to 1")
        if occupation < 0.0:
            raise DomainError("mode occupation must be >= 0")
        if occupation > 0.0:
            ratio = occupation / (1.0 + occupation)
            weights = ratio ** np.arange(fock_cutoff)
            tail = ratio ** fock_cutoff
            if tail > 1e-5:
                warnings.warn(
                    f"thermal tail beyond the Fock cutoff holds {tail:.1e} "
                    "probability; increase fock_cutoff", TruncationWarning,
                    stacklevel=2)
        else:
            weights = np.zeros(fock_cutoff)
            weights[0] = 1.0
        weights = weights / weights.sum()
        rho = np.diag(spin_pops.astype(complex))
        for _ in range(n_spins - 1):
            rho = np.kron(rho, np.diag(spin_pops.astype(complex)))
        rho = np.kron(rho, np.diag(weights.astype(complex)))
        return cls(n_spins=n_spins, fock_cutoff=fock_cutoff, matrix=rho)


@dataclass
class Liouvillian:
    """Superoperator (column-stacked convention) plus moment observables."""

    matrix: sp.csr_matrix
    dim: int
    n_spins: int
    fock_cutoff: int
    observables: dict

    def expect(self, name: str, rho: np.ndarray) -> complex:
        return complex((self.observables[name] @ rho).diagonal().sum())


def build_liouvillian(params: SystemParams, xi: float, n_spins: int,
                      fock_cutoff: int,
                      drive: DriveParams | None = None) -> Liouvillian:
    """Assemble the master-equation superoperator.

    Without a drive the frame rotates at the 3<->1 transition frequency
    (mode detuning omega_m - omega31); with a drive it rotates at the
    drive frequency and the coherent tone enters the Hamiltonian.
    """
    r = params.rates
    res = params.resonator
    dim = _SPIN_DIM ** n_spins * fock_cutoff
    eye_spin = sp.identity(_SPIN_DIM, format="csr")
    eye_mode = sp.identity(fock_cutoff, format="csr")

    def spin_op(k: int, m: sp.csr_matrix) -> sp.csr_matrix:
        slots = [eye_spin] * n_spins + [eye_mode]
        slots[k] = m
        return _embed(slots)

    def mode_op(m: sp.csr_matrix) -> sp.csr_matrix:
        slots = [eye_spin] * n_spins + [m]
        slots[n_spins] = m
        return _embed(slots)

    a = mode_op(_destroy(fock_cutoff))
    adag = a.conj().T.tocsr()
    number = (adag @ a).tocsr()

    nth = params.thermal_occupation()

    if drive is None:
        delta_mode = res.omega_m - res.omega31
        delta_spin = 0.0
        eta = 0.0
    else:
        delta_mode = drive.detuning_mode
        delta_spin = drive.detuning_spin
        eta = drive.amplitude * math.sqrt(res.kappa / 2.0)

    ham = delta_mode * number
    if eta != 0.0:
        ham = ham + eta * (a + adag)
    for k in range(n_spins):
        flip = spin_op(k, _mat_unit(1, 3))  # sigma^13 lowers the spin branch
        ham = ham + res.g31 * (adag @ flip + a @ flip.conj().T)
        if delta_spin != 0.0:
            ham = ham + delta_spin * spin_op(k, _mat_unit(3, 3))
    ham = ham.tocsr()

    channels = []
    for k in range(n_spins):
        per_spin = [
            (xi, _mat_unit(4, 1)), (xi, _mat_unit(5, 2)), (xi, _mat_unit(6, 3)),
            (xi + r.k_sp, _mat_unit(1, 4)),
            (xi + r.k_sp, _mat_unit(2, 5)),
            (xi + r.k_sp, _mat_unit(3, 6)),
            (r.k47, _mat_unit(7, 4)), (r.k57, _mat_unit(7, 5)),
            (r.k67, _mat_unit(7, 6)),
            (r.k71, _mat_unit(1, 7)), (r.k72, _mat_unit(2, 7)),
            (r.k73, _mat_unit(3, 7)),
            (r.k31, _mat_unit(1, 3)), (r.k13, _mat_unit(3, 1)),
            (r.k21, _mat_unit(1, 2)), (r.k12, _mat_unit(2, 1)),
            (2.0 * r.chi2, _mat_unit(2, 2)), (2.0 * r.chi3, _mat_unit(3, 3)),
        ]
        channels.extend((rate, spin_op(k, m)) for rate, m in per_spin
                        if rate > 0.0)
    channels.append((res.kappa * (nth + 1.0), a))
    if nth > 0.0:
        channels.append((res.kappa * nth, adag))

    eye = sp.identity(dim, format="csr")
    # column-stacking: vec(A X B) = (B^T kron A) vec(X)
    super_op = -1j * (sp.kron(eye, ham) - sp.kron(ham.T, eye))
    for rate, lop in channels:
        ldag = lop.conj().T.tocsr()
        ldl = (ldag @ lop).tocsr()
        super_op = super_op + rate * (
            sp.kron(lop.conj(), lop)
            - 0.5 * sp.kron(eye, ldl) - 0.5 * sp.kron(ldl.T, eye))
    super_op = super_op.tocsr()

    observables = {"photon_n": number, "a_mean": a, "aa": (a @ a).tocsr()}
    for level in range(1, 8):
        observables[f"pop{level}"] = spin_op(0, _mat_unit(level, level))
    flip1 = spin_op(0, _mat_unit(1, 3))
    observables["spin_photon"] = (adag @ flip1).tocsr()
    observables["a_sigma13"] = (a @ flip1).tocsr()
    observables["a_pop1"] = (a @ spin_op(0, _mat_unit(1, 1))).tocsr()
    observables["a_pop3"] = (a @ spin_op(0, _mat_unit(3, 3))).tocsr()
    observables["sigma13_mean"] = flip1
    if n_spins >= 2:
        flip2 = spin_op(1, _mat_unit(1, 3))
        raise1 = flip1.conj().T.tocsr()
        observables["spin_spin"] = (raise1 @ flip2).tocsr()
        observables["sigma13_sigma13"] = (flip1 @ flip2).tocsr()
        observables["pop1_sigma13"] = \
            (spin_op(0, _mat_unit(1, 1)) @ flip2).tocsr()
        observables["pop3_sigma13"] = \
            (spin_op(0, _mat_unit(3, 3)) @ flip2).tocsr()

    return Liouvillian(matrix=super_op, dim=dim, n_spins=n_spins,
                       fock_cutoff=fock_cutoff, observables=observables)


@dataclass
class OracleResult:
    """Exact moments sampled on a time grid, plus consistency checks."""

    times: np.ndarray
    moments: dict
    trace_drift: float
    min_eigenvalue: float


def evolve(state: DensityState, liouv: Liouvillian, times, *,
           rtol: float = 1e-8, atol: float = 1e-11,
           method: str = "DOP853") -> OracleResult:
    """Propagate the density matrix and record moments at ``times``.

    Integration proceeds chunk by chunk between sample points so only one
    density matrix is held in memory.
    """
    times = np.asarray(times, dtype=float)
    dim = liouv.dim
    y = state.matrix.astype(complex).flatten(order="F")
    names = list(liouv.observables)
    moments = {name: np.empty(times.size, dtype=complex) for name in names}
    trace_drift = 0.0

    def record(idx, vec):
        nonlocal trace_drift
        rho = vec.reshape((dim, dim), order="F")
        for name in names:
            moments[name][idx] = liouv.expect(name, rho)
        trace_drift = max(trace_drift, abs(np.trace(rho).real - 1.0)
                          + abs(np.trace(rho).imag))
        return rho

    def rhs(t, vec):
        return liouv.matrix @ vec

    rho = record(0, y)
    for idx in range(1, times.size):
        sol = solve_ivp(rhs, (times[idx - 1], times[idx]), y, method=method,
                        rtol=rtol, atol=atol)
        if not sol.success:
            raise RuntimeError(f"oracle integration failed: {sol.message}")
        y = sol.y[:, -1]
        rho = record(idx, y)

    herm = 0.5 * (rho + rho.conj().T)
    min_eig = float(np.linalg.eigvalsh(herm).min())
    return OracleResult(times=times, moments=moments,
                        trace_drift=float(trace_drift), min_eigenvalue=min_eig)


# ----------------------------------------------------------------------
# Frozen comparison fixtures
# ----------------------------------------------------------------------

_FIXTURE_RATES = NvRates(xi=0.0, k_sp=2.0, k47=0.8, k57=1.2, k67=1.2,
                         k71=0.25, k72=0.2, k73=0.3,
                         k31=0.05, k13=0.05, k21=0.04, k12=0.04,
                         chi2=0.4, chi3=0.5)


def _fixture_params(n_spins: int, g: float, occupation: float,
                    delta: float = 0.0, rates: NvRates = _FIXTURE_RATES,
                    ) -> SystemParams:
    """Desk-scale parameter set with an exactly prescribed mode occupation."""
    omega31 = 100.0
    omega_m = omega31 + delta
    bath = effective_temperature(omega_m, occupation)
    resonator = ResonatorParams(omega_m=omega_m, kappa=1.0, omega31=omega31,
                                omega21=50.0, g31=g, g21=0.0,
                                n_spins=float(n_spins), bath_temperature=bath)
    return SystemParams(rates=rates, resonator=resonator)


@dataclass(frozen=True)
class OracleFixture:
    """One frozen oracle-vs-closure comparison."""

    name: str
    params: SystemParams
    xi: float
    n_spins: int
    fock_cutoff: int
    t_final: float
    n_samples: int
    init_pops: tuple
    drive: DriveParams | None = None
    tolerances: dict = field(default_factory=dict)
    description: str = ""


def oracle_fixtures(quick: bool = False) -> list:
    """The comparison fixtures, ordered by cost.

    The couplings are chosen weak enough that the moment closure's
    truncation error sits below the stated tolerances; an error in any
    equation term would show up orders of magnitude above them.  The
    population gates compare absolute deviations (stricter than relative,
    since every population is below one); correlation channels compare
    relative to the channel's peak magnitude.

    ``quick`` returns a single reduced-size variant of the first fixture
    (for smoke tests).
    """
    uniform = (1 / 3, 1 / 3, 1 / 3, 0.0, 0.0, 0.0, 0.0)
    polarized = (0.7, 0.0, 0.3, 0.0, 0.0, 0.0, 0.0)
    two_level = (0.6, 0.0, 0.4, 0.0, 0.0, 0.0, 0.0)
    driven_rates = NvRates(xi=0.0, k_sp=2.0, k47=0.8, k57=1.2, k67=1.2,
                           k71=0.25, k72=0.2, k73=0.3,
                           k31=0.05, k13=0.05, k21=0.0, k12=0.0,
                           chi2=0.4, chi3=0.5)
    if quick:
        return [OracleFixture(
            name="undriven-single-spin-quick",
            params=_fixture_params(1, 0.25, 2.0, delta=0.7),
            xi=0.3, n_spins=1, fock_cutoff=30, t_final=1.5, n_samples=16,
            init_pops=uniform,
            tolerances={"pop": 2.5e-3, "photon_n": 2.5e-3},
            description="reduced-size smoke variant of the single-spin gate",
        )]
    return [
        OracleFixture(
            name="undriven-single-spin",
            params=_fixture_params(1, 0.1, 2.0, delta=0.7),
            xi=0.3, n_spins=1, fock_cutoff=36, t_final=5.0, n_samples=41,
            init_pops=uniform,
            tolerances={"pop": 1e-3, "photon_n": 1e-3},
            description="laser pumping plus mode coupling, one spin",
        ),
        OracleFixture(
            name="undriven-spin-pair",
            params=_fixture_params(2, 0.05, 0.3),
            xi=0.3, n_spins=2, fock_cutoff=12, t_final=3.0, n_samples=21,
            init_pops=polarized,
            tolerances={"pop": 1e-3, "photon_n": 1e-3, "spin_spin": 1e-2},
            description="two spins sharing the mode; pair correlation",
        ),
        OracleFixture(
            name="driven-single-spin",
            params=_fixture_params(1, 0.05, 0.5,
                                   delta=0.5, rates=driven_rates),
            xi=0.0, n_spins=1, fock_cutoff=30, t_final=5.0, n_samples=41,
            init_pops=two_level,
            drive=DriveParams(amplitude=0.4 / math.sqrt(0.5),
                              detuning_mode=0.3, detuning_spin=-0.2),
            tolerances={"pop": 1e-4, "photon_n": 1e-4, "a_mean": 1e-4},
            description="coherent tone on one spin and the mode",
        ),
        OracleFixture(
            name="driven-spin-pair",
            params=_fixture_params(2, 0.1, 0.3,
                                   delta=0.5, rates=driven_rates),
            xi=0.0, n_spins=2, fock_cutoff=12, t_final=3.0, n_samples=25,
            init_pops=two_level,
            drive=DriveParams(amplitude=0.3 / math.sqrt(0.5),
                              detuning_mode=0.3, detuning_spin=-0.2),
            tolerances={"pop": 1e-3, "photon_n": 1e-3, "spin_spin": 5e-2,
                        "sigma13_sigma13": 2e-2, "pop1_sigma13": 1e-2,
                        "pop3_sigma13": 1e-2},
            description="coherent tone on a spin pair; all pair channels",
        ),
    ]


_CHANNEL_SLICES = {
    "spin_photon": (8, 9), "spin_spin": (10, 11), "a_mean": (12, 13),
    "sigma13_mean": (14, 15), "aa": (16, 17), "a_sigma13": (18, 19),
    "a_pop1": (20, 21), "a_pop3": (22, 23), "sigma13_sigma13": (24, 25),
    "pop1_sigma13": (26, 27), "pop3_sigma13": (28, 29),
}


@dataclass
class GateResult:
    """Outcome of one oracle comparison."""

    name: str
    passed: bool
    deviations: dict       # channel -> measured deviation
    tolerances: dict       # channel -> allowed deviation
    trace_drift: float
    min_eigenvalue: float

    def summary(self) -> str:
        status = "pass" if self.passed else "FAIL"
        worst = max((self.deviations[c] / self.tolerances[c], c)
                    for c in self.tolerances)
        return (f"{self.name}: {status} "
                f"(worst channel {worst[1]}: {self.deviations[worst[1]]:.2e} "
                f"vs tol {self.tolerances[worst[1]]:.0e}; "
                f"trace drift {self.trace_drift:.1e})")


def run_gate(fixture: OracleFixture, rtol: float = 1e-10) -> GateResult:
    """Integrate both sides of one fixture and compare moment histories."""
    times = np.linspace(0.0, fixture.t_final, fixture.n_samples)
    occupation = fixture.params.thermal_occupation()

    liouv = build_liouvillian(fixture.params, fixture.xi, fixture.n_spins,
                              fixture.fock_cutoff, drive=fixture.drive)
    rho0 = DensityState.product(fixture.init_pops, fixture.n_spins,
                                fixture.fock_cutoff, occupation)
    exact = evolve(rho0, liouv, times, rtol=1e-9, atol=1e-12)

    base = MomentState(pop=np.array(fixture.init_pops), photon_n=occupation)
    if fixture.drive is not None:
        initial = DrivenMomentState.from_undriven(base)
    else:
        initial = base
    phases = [Phase(0.0, fixture.t_final, xi=fixture.xi, drive=fixture.drive)]
    traj = integrate(fixture.params, initial, phases, rtol=rtol,
                     atol=np.full(initial.to_flat().size, 1e-13),
                     points_per_phase=fixture.n_samples - 1, method="DOP853")

    deviations = {}
    for channel in fixture.tolerances:
        if channel == "pop":
            worst = 0.0
            for level in range(7):
                ref = exact.moments[f"pop{level + 1}"].real
                worst = max(worst, float(np.max(np.abs(
                    traj.states[:, level] - ref))))
            deviations["pop"] = worst
        elif channel == "photon_n":
            ref = exact.moments["photon_n"].real
            scale = max(float(np.max(np.abs(ref))), 1e-12)
            deviations["photon_n"] = float(np.max(np.abs(
                traj.photon_n - ref))) / scale
        else:
            re, im = _CHANNEL_SLICES[channel]
            model = traj.states[:, re] + 1j * traj.states[:, im]
            ref = exact.moments[channel]
            scale = max(float(np.max(np.abs(ref))), 1e-12)
            deviations[channel] = float(np.max(np.abs(model - ref))) / scale

    passed = all(deviations[c] <= fixture.tolerances[c]
                 for c in fixture.tolerances)
    return GateResult(name=fixture.name, passed=passed, deviations=deviations,
                      tolerances=dict(fixture.tolerances),
                      trace_drift=exact.trace_drift,
                      min_eigenvalue=exact.min_eigenvalue)


def run_oracle_suite(names=None, quick: bool = False) -> list:
    """Run all (or selected) oracle gates and return their results."""
    fixtures = oracle_fixtures(quick=quick)
    if names:
        known = {fixture.name: fixture for fixture in fixtures}
        missing = sorted(set(names) - set(known))
        if missing:
            raise DomainError(
                f"unknown oracle gate(s) {', '.join(missing)}; "
                f"available: {', '.join(known)}")
        fixtures = [known[name] for name in names]
    return [run_gate(fixture) for fixture in fixtures]
