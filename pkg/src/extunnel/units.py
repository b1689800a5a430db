"""Unit system and material constants.

Everything in the package is expressed in nanometers, femtoseconds and
electron-volts.  In this system

    hbar = 0.6582119569 eV fs
    m_e  = (m_e c^2) / c^2 = 5.685630 eV fs^2 / nm^2

so the kinetic coefficient hbar^2/(2 m) of a free electron is
0.0380998 eV nm^2, and 0.568654 eV nm^2 for the GaAs effective mass 0.067.
Times quoted in ps map with a factor 1000, barrier widths are already nm.
"""

from dataclasses import dataclass

import numpy as np

HBAR_EV_FS = 0.6582119569        # CODATA, eV fs
ELECTRON_MASS_C2_EV = 510998.95  # CODATA, m_e c^2 in eV
C_NM_PER_FS = 299.792458         # exact, nm/fs
COULOMB_EV_NM = 1.43996454741    # q^2/(4 pi eps_0) = alpha * hbar c, eV nm

ELECTRON_MASS = ELECTRON_MASS_C2_EV / C_NM_PER_FS**2  # eV fs^2 / nm^2


@dataclass(frozen=True)
class Constants:
    """Material constants fixing the single-particle Hamiltonian.

    kinetic_coeff is hbar^2/(2 m_eff m_e) in eV nm^2; charge_coulomb_coeff
    is q^2/(4 pi eps_r eps_0) in eV nm.  Immutable, shareable.
    """

    hbar: float
    m_eff: float
    kinetic_coeff: float
    charge_coulomb_coeff: float

    def energy_to_k(self, energy_ev):
        """Central wave number k (1/nm) of a packet with kinetic energy E."""
        return np.sqrt(np.asarray(energy_ev, dtype=float) / self.kinetic_coeff)

    def k_to_energy(self, k):
        """Kinetic energy (eV) of wave number k (1/nm)."""
        return self.kinetic_coeff * np.square(np.asarray(k, dtype=float))

    def velocity(self, k):
        """Group velocity hbar k / m in nm/fs (1 nm/fs = 1e6 m/s)."""
        return 2.0 * self.kinetic_coeff * np.asarray(k, dtype=float) / self.hbar


def constants_for(material_mass_fraction: float = 0.067,
                  epsilon_r: float = 11.6) -> Constants:
    """Constants for an effective mass (fraction of m_e) and permittivity."""
    if not material_mass_fraction > 0:
        raise ValueError(f"mass fraction must be positive, got {material_mass_fraction}")
    if not epsilon_r >= 1.0:
        raise ValueError(f"epsilon_r must be >= 1, got {epsilon_r}")
    kinetic = HBAR_EV_FS**2 / (2.0 * material_mass_fraction * ELECTRON_MASS)
    return Constants(
        hbar=HBAR_EV_FS,
        m_eff=material_mass_fraction,
        kinetic_coeff=kinetic,
        charge_coulomb_coeff=COULOMB_EV_NM / epsilon_r,
    )


#: GaAs conduction band, the material of every built-in scenario.
GAAS = constants_for(0.067, 11.6)
