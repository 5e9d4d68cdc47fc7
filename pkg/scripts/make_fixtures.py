"""Regenerate the bundled FCIDUMP fixtures (requires pyscf; not a runtime dependency).

    python scripts/make_fixtures.py

Writes canonical RHF integrals (STO-3G unless noted), orbital energies and element lists to
``src/vqekit/data``.
"""

from pathlib import Path

import numpy as np
from pyscf import ao2mo, gto, scf

from vqekit.fcidump import MolecularIntegrals, save_fcidump

OUT = Path(__file__).resolve().parents[1] / "src" / "vqekit" / "data"

H2_DISTANCES = [0.5, 0.6, 0.7, 0.7414, 0.9, 1.1, 1.4, 1.8, 2.2, 2.6]
LIH_DISTANCES = [1.2, 1.4, 1.5949, 1.8, 2.0, 2.3, 2.6, 3.0, 3.4]
# stretched H2 in a larger basis: 10 spatial orbitals, one pair (mitigation study)
H2_DZ_DISTANCES = [2.0, 2.5]


def dump(atom: str, name: str, elements: list[str], basis: str = "sto-3g") -> None:
    mol = gto.M(atom=atom, basis=basis, unit="Angstrom", verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    if not mf.converged:
        raise RuntimeError(f"RHF did not converge for {name}")
    c = mf.mo_coeff
    h1 = c.T @ mf.get_hcore() @ c
    n = c.shape[1]
    eri = ao2mo.restore(1, ao2mo.kernel(mol, c), n)
    h1 = 0.5 * (h1 + h1.T)
    h1[np.abs(h1) < 1e-14] = 0.0
    eri[np.abs(eri) < 1e-14] = 0.0
    mi = MolecularIntegrals(
        n_orbitals=n, n_electrons=mol.nelectron, ms2=mol.spin, core_energy=mol.energy_nuc(),
        one_body=h1, two_body=eri, orbital_energies=mf.mo_energy, elements=tuple(elements),
    )
    mi.validate(tol=1e-10)
    save_fcidump(mi, OUT / f"{name}.fcidump")
    print(f"{name}: n={n} e_hf={mf.e_tot:.10f}")


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    for r in H2_DISTANCES:
        dump(f"H 0 0 0; H 0 0 {r}", f"h2_sto3g_{r:.4f}", ["H", "H"])
    for r in LIH_DISTANCES:
        dump(f"Li 0 0 0; H 0 0 {r}", f"lih_sto3g_{r:.4f}", ["Li", "H"])
    for r in H2_DZ_DISTANCES:
        dump(f"H 0 0 0; H 0 0 {r}", f"h2_ccpvdz_{r:.4f}", ["H", "H"], basis="cc-pvdz")
    ch3f = (
        "C 0.0 0.0 0.0; F 0.0 0.0 {r};"
        " H 1.0289 0.0 -0.3640; H -0.5144 0.8910 -0.3640; H -0.5144 -0.8910 -0.3640"
    )
    for tag, r in (("eq", 1.3820), ("stretched", 2.2)):
        dump(ch3f.format(r=r), f"ch3f_sto3g_{tag}", ["C", "H", "H", "H", "F"])


if __name__ == "__main__":
    main()
