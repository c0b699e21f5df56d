import math

import numpy as np
import pytest

from adiaprep import (
    C6_DEFAULT,
    DomainError,
    EllipticPathParams,
    IsingParams,
    IsingSemicirclePath,
    ResourceLimitError,
    RydbergEllipticPath,
    RydbergParams,
    chain_positions,
    elliptic_e,
    elliptic_path,
    ising_hamiltonian,
    ket_index,
    lowest_eigenpairs,
    neel_ket,
    path_hamiltonian,
    rydberg_hamiltonian,
    semicircle_path,
)
from oracles import naive_ising, naive_rydberg


class TestIsingHamiltonian:
    @pytest.mark.parametrize("h", [-1.5, -0.75, 0.3])
    def test_two_spin_diagonal(self, h):
        H = ising_hamiltonian(IsingParams(L=2, g=0.0, h=h)).dense()
        assert np.allclose(np.diag(H), [0.25 + h, -0.25, -0.25, 0.25 - h], atol=0)

    def test_ferromagnetic_ground_state(self):
        H = ising_hamiltonian(IsingParams(L=5, g=0.0, h=-1.5))
        data = lowest_eigenpairs(H, k=2)
        assert np.argmax(np.abs(data.phi0)) == ket_index("00000")
        assert data.e0 == pytest.approx(4 * 0.25 + 5 * (-1.5) * 0.5, abs=1e-12)

    def test_antiferromagnetic_ground_state(self):
        H = ising_hamiltonian(IsingParams(L=5, g=0.0, h=-0.75))
        data = lowest_eigenpairs(H, k=2)
        assert np.argmax(np.abs(data.phi0)) == ket_index(neel_ket(5))

    @pytest.mark.parametrize("L,g,h", [(2, 0.3, -1.0), (4, 0.5, -1.0), (6, 0.17, -0.6)])
    def test_matches_kronecker_oracle(self, L, g, h):
        built = ising_hamiltonian(IsingParams(L=L, g=g, h=h)).dense()
        assert np.max(np.abs(built - naive_ising(L, g, h))) < 1e-14

    def test_offdiagonal_structure(self):
        g = 0.37
        H = ising_hamiltonian(IsingParams(L=4, g=g, h=-0.9)).dense()
        off = H - np.diag(np.diag(H))
        idx = np.arange(16)
        hamming = np.array([[bin(a ^ b).count("1") for b in idx] for a in idx])
        assert np.all(off[hamming != 1] == 0)
        assert np.all(off[hamming == 1] == g / 2)

    def test_hermitian(self):
        op = ising_hamiltonian(IsingParams(L=6, g=0.41, h=-1.2))
        assert op.hermiticity_defect() <= 1e-12

    def test_l_too_small(self):
        with pytest.raises(DomainError):
            IsingParams(L=1, g=0.0, h=0.0)

    def test_dim_cap(self):
        with pytest.raises(ResourceLimitError):
            ising_hamiltonian(IsingParams(L=12, g=0.1, h=0.1), dim_cap=2 ** 10)


class TestSemicirclePath:
    def test_endpoints_and_midpoint(self):
        assert semicircle_path(0.0) == (0.0, -1.5)
        g1, h1 = semicircle_path(1.0)
        assert g1 == pytest.approx(0.0, abs=1e-15)
        assert h1 == -0.5
        assert semicircle_path(0.5) == (0.5, -1.0)

    def test_field_ranges(self):
        taus = np.linspace(0, 1, 301)
        g, h = semicircle_path(taus)
        assert np.all((g >= 0) & (g <= 0.5))
        assert np.all((h >= -1.5) & (h <= -0.5))

    def test_constant_drive_norm(self):
        # || dH/dtau ||_2 is tau-independent along the semicircular arc.
        path = IsingSemicirclePath(4)
        h = 1e-4
        norms = []
        for tau in (0.1, 0.3, 0.5, 0.7, 0.9):
            dH = (path.operator(tau + h).dense() - path.operator(tau - h).dense()) / (2 * h)
            norms.append(np.linalg.norm(dH, 2))
        assert np.allclose(norms, (np.pi / 2) * (4 / 2), rtol=1e-6)


class TestRydbergHamiltonian:
    def test_single_atom_spectrum(self):
        p = RydbergParams(positions=((0.0, 0.0),), omega=0.0, delta=2.0)
        vals = np.sort(np.diag(rydberg_hamiltonian(p).dense()))
        assert np.allclose(vals, [-2.0, 0.0], atol=0)

    def test_two_atom_blockade_energy(self):
        a = 5.6
        p = RydbergParams(positions=chain_positions(2, a), omega=0.0, delta=0.0)
        H = rydberg_hamiltonian(p).dense()
        assert H[3, 3] == pytest.approx(C6_DEFAULT / a ** 6, rel=1e-14)
        assert H[3, 3] / (2 * math.pi) == pytest.approx(27.97, abs=0.01)

    def test_real_symmetric_at_zero_phase(self):
        p = RydbergParams(positions=chain_positions(3, 5.6), omega=1.7, delta=4.0)
        H = rydberg_hamiltonian(p).matrix
        assert not np.iscomplexobj(H.toarray())
        assert np.max(np.abs((H - H.T).toarray())) == 0.0

    @pytest.mark.parametrize("phi", [0.0, 0.8])
    def test_matches_kronecker_oracle(self, phi):
        p = RydbergParams(positions=chain_positions(4, 5.6), omega=1.3, phi=phi, delta=2.2)
        built = rydberg_hamiltonian(p).dense()
        ref = naive_rydberg(p.positions, p.omega, p.phi, p.delta, p.c6)
        assert np.max(np.abs(built - ref)) < 1e-12

    def test_interaction_is_diagonal_and_flips_are_offdiagonal(self):
        omega = 0.9
        p = RydbergParams(positions=chain_positions(3, 5.6), omega=omega, delta=0.0)
        H = rydberg_hamiltonian(p).dense()
        off = H - np.diag(np.diag(H))
        idx = np.arange(8)
        hamming = np.array([[bin(a ^ b).count("1") for b in idx] for a in idx])
        assert np.all(off[hamming != 1] == 0)
        assert np.all(off[hamming == 1] == omega / 2)

    def test_coincident_atoms_rejected(self):
        with pytest.raises(DomainError):
            RydbergParams(positions=((0.0, 0.0), (0.0, 0.0)), omega=1.0)

    def test_hermitian_with_phase(self):
        p = RydbergParams(positions=chain_positions(3, 5.6), omega=1.0, phi=1.2, delta=0.5)
        assert rydberg_hamiltonian(p).hermiticity_defect() <= 1e-12


class TestEllipticPath:
    def test_parameter_invariants(self):
        p = EllipticPathParams()
        assert p.omega_r == pytest.approx(2.5 * 2 * math.pi)
        assert p.delta_r == pytest.approx(8.75 * 2 * math.pi)
        assert 0 < p.eccentricity < 1
        assert p.m == pytest.approx(-11.25, rel=1e-12)

    def test_start_point(self):
        p = EllipticPathParams()
        delta, omega = elliptic_path(0.0, p)
        assert delta == pytest.approx(p.delta_r, rel=1e-12)
        assert omega == 0.0

    def test_end_point_via_half_perimeter_identity(self):
        # u(1) = P / (2 Omega_R) must equal E(pi, m): check the identity
        # Omega_R E(pi, m) = 2 Delta_R E(pi/2, e^2) numerically, then the path.
        p = EllipticPathParams()
        lhs = p.omega_r * elliptic_e(math.pi, p.m)
        rhs = 2 * p.delta_r * elliptic_e(math.pi / 2, p.eccentricity ** 2)
        assert lhs == pytest.approx(rhs, rel=1e-12)
        delta, omega = elliptic_path(1.0, p)
        assert delta == pytest.approx(-p.delta_r, rel=1e-10)
        assert abs(omega) < 1e-8

    def test_constant_speed(self):
        p = EllipticPathParams()
        taus = np.linspace(1e-4, 1 - 1e-4, 1000)
        h = 1e-5
        dp, op_ = elliptic_path(taus + h, p)
        dm, om = elliptic_path(taus - h, p)
        speed = np.sqrt((dp - dm) ** 2 + (op_ - om) ** 2) / (2 * h)
        assert (speed.max() - speed.min()) / speed.mean() < 1e-6

    def test_requires_omega_below_delta(self):
        with pytest.raises(DomainError):
            EllipticPathParams(omega_r=10.0, delta_r=5.0)


class TestPathComposition:
    def test_ising_endpoints(self):
        path = IsingSemicirclePath(3)
        H0 = path_hamiltonian(path, 0.0).dense()
        assert np.allclose(H0, naive_ising(3, 0.0, -1.5), atol=1e-14)
        H_mid = path_hamiltonian(path, 0.5).dense()
        assert np.allclose(H_mid, naive_ising(3, 0.5, -1.0), atol=1e-14)

    def test_rydberg_default_orientation(self):
        path = RydbergEllipticPath(chain_positions(2, 5.6))
        H0 = path_hamiltonian(path, 0.0).dense()
        ref = naive_rydberg(chain_positions(2, 5.6), 0.0, 0.0, path.params.delta_r, C6_DEFAULT)
        assert np.allclose(H0, ref, atol=1e-12)

    def test_rydberg_ferromagnetic_start(self):
        path = RydbergEllipticPath(chain_positions(2, 5.6), start_ferromagnetic=True)
        delta0, _ = path.fields(0.0)
        assert delta0 == pytest.approx(-path.params.delta_r, rel=1e-12)
        delta1, _ = path.fields(1.0)
        assert delta1 == pytest.approx(path.params.delta_r, rel=1e-12)

    def test_fast_fields_match_reference_inversion(self):
        path = RydbergEllipticPath(chain_positions(3, 5.6))
        for s in (0.0, 0.21, 0.5, 0.77, 1.0):
            d_ref, o_ref = elliptic_path(s, path.params)
            d_fast, o_fast = path.fields(s)
            assert d_fast == pytest.approx(d_ref, abs=1e-10)
            assert o_fast == pytest.approx(o_ref, abs=1e-10)

    def test_matvec_matches_operator(self):
        for path in (IsingSemicirclePath(4),
                     RydbergEllipticPath(chain_positions(3, 5.6), start_ferromagnetic=True)):
            rng = np.random.default_rng(7)
            psi = rng.normal(size=path.dim) + 1j * rng.normal(size=path.dim)
            for s in (0.0, 0.35, 1.0):
                direct = path.matvec(s, psi)
                assembled = path.operator(s).matrix @ psi
                assert np.max(np.abs(direct - assembled)) < 1e-12

    def test_norm_bound_dominates(self):
        path = IsingSemicirclePath(4)
        bound = path.norm_bound()
        for s in (0.0, 0.5, 1.0):
            top = np.abs(np.linalg.eigvalsh(path.operator(s).dense())).max()
            assert top <= bound + 1e-12

    def test_operator_hermitian_along_path(self):
        path = RydbergEllipticPath(chain_positions(3, 5.6), start_ferromagnetic=True)
        for s in (0.0, 0.3, 0.8):
            assert path.operator(s).hermiticity_defect() <= 1e-12
